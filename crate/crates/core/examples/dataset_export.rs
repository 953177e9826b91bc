//! Export a small labelled dataset (fading, carrier offset and noise per
//! frame), then replay a mock classifier's predictions to see what a
//! wrong guess of alpha costs the eavesdropper.
//!
//!     cargo run --release --example dataset_export [out_dir]

use std::path::PathBuf;

use sefdm::experiments::{
    banded_waveform, export_dataset, read_predictions, replay_predictions, DatasetConfig, ReplayConfig, TypeSet,
};

fn main() -> sefdm::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("sefdm_dataset_example"));
    let cfg = DatasetConfig {
        type_set: TypeSet::TypeI,
        frames_per_class: 20,
        master_seed: 1,
        ..DatasetConfig::default()
    };
    let manifest = export_dataset(&cfg, &out)?;
    println!(
        "{} frames of {} samples in {} classes -> {}",
        manifest.total_frames,
        manifest.samples_per_frame,
        manifest.files.len(),
        out.display()
    );

    // A classifier that mistakes every third frame for the next class down.
    let alphas = manifest.class_labels.clone();
    let mut csv = String::from("frame_index,true_alpha,pred_alpha\n");
    for file in &manifest.files {
        let class = file.class_index as usize;
        for f in 0..manifest.frames_per_class {
            let pred = if f % 3 == 0 { alphas[(class + 1) % alphas.len()] } else { alphas[class] };
            csv += &format!("{},{},{}\n", file.first_frame_index + f, file.alpha_target, pred);
        }
    }
    let predictions = read_predictions(csv.as_bytes())?;
    let replay = ReplayConfig {
        waveform: banded_waveform(256, 1.0, 8, 8, 2)?,
        ..ReplayConfig::default()
    };
    let report = replay_predictions(&replay, &predictions)?;
    for c in &report.classes {
        println!(
            "alpha {:<4} accuracy {:>5.1}%  eavesdropper BER {:.3e}  legitimate BER {:.3e}",
            c.true_alpha,
            100.0 * c.correctly_classified as f64 / c.frames as f64,
            c.eavesdropper_ber,
            c.legitimate_ber
        );
    }
    Ok(())
}
