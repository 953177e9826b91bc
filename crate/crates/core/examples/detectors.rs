//! The four receivers on the same noisy alpha = 0.8 frames: matched filter,
//! exhaustive ML, sphere decoding and block (multi-band) sphere decoding.
//!
//!     cargo run --release --example detectors

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sefdm::channel::{awgn, NoiseSpec};
use sefdm::detect::{Detector, DetectorId, MultiSdOptions};
use sefdm::waveform::{BandPlan, Modulator};
use sefdm::{qpsk_map, FrameMeta, IqFrame, WaveformConfig};

fn run(cfg: &WaveformConfig, ids: &[DetectorId], es_n0: f64, frames: u64) -> sefdm::Result<()> {
    let tx = Modulator::for_config(cfg)?;
    let detectors: Vec<Detector> = ids
        .iter()
        .map(|&id| Detector::build(id, cfg, MultiSdOptions::default()))
        .collect::<sefdm::Result<_>>()?;
    let mut errors = vec![0u64; ids.len()];
    let mut nodes = vec![0u64; ids.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for f in 0..frames {
        let bits: Vec<u8> = (0..2 * cfg.n_subcarriers()).map(|_| rng.random_range(0..2)).collect();
        let meta = FrameMeta {
            alpha_effective: cfg.alpha_effective(),
            n_subcarriers: cfg.n_subcarriers(),
            oversampling: cfg.oversampling(),
            es_n0_db: None,
            class_label: None,
            rng_seed: f,
        };
        let clean = IqFrame::new(tx.modulate(&qpsk_map(&bits)?)?, meta);
        let rx = awgn(&clean, NoiseSpec::new(es_n0), f)?;
        for (k, d) in detectors.iter().enumerate() {
            let out = d.detect(&rx)?;
            errors[k] += bits.iter().zip(&out.bits).filter(|(a, b)| a != b).count() as u64;
            nodes[k] += out.visited_nodes;
        }
    }
    let total = frames * 2 * cfg.n_subcarriers() as u64;
    println!("{cfg} at {es_n0} dB");
    for (k, id) in ids.iter().enumerate() {
        println!(
            "  {:<8} BER {:.3e}  mean nodes {:.0}",
            id.to_string(),
            errors[k] as f64 / total as f64,
            nodes[k] as f64 / frames as f64
        );
    }
    Ok(())
}

fn main() -> sefdm::Result<()> {
    let small = WaveformConfig::new(6, 0.8, 8)?;
    run(&small, &[DetectorId::Mf, DetectorId::Ml, DetectorId::Sd], 10.0, 3000)?;

    let banded = WaveformConfig::new(64, 0.8, 8)?.with_band_plan(BandPlan::uniform(64, 8, 2)?)?;
    run(&banded, &[DetectorId::Mf, DetectorId::MultiSd], 12.0, 100)?;
    Ok(())
}
