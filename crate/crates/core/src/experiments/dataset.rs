use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::random_bits;
use crate::channel::{add_noise, apply_cfo, noise_variance, rician_multipath, ChannelProfile, NoiseSpec};
use crate::error::{invalid, Result};
use crate::iq::{write_frames, IqFrame, IqManifest};
use crate::qpsk::qpsk_map;
use crate::rng::{derive_seed, stream};
use crate::waveform::{Modulator, WaveformConfig};

/// Compression-factor class sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TypeSet {
    #[serde(rename = "type_i")]
    TypeI,
    #[serde(rename = "type_ii")]
    TypeII,
}

impl TypeSet {
    pub fn alphas(self) -> Vec<f64> {
        match self {
            TypeSet::TypeI => vec![1.0, 0.9, 0.8, 0.7],
            TypeSet::TypeII => vec![1.0, 0.95, 0.9, 0.85, 0.8, 0.75, 0.7],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    pub type_set: TypeSet,
    /// Overrides the type set's classes when given.
    pub class_alphas: Option<Vec<f64>>,
    pub frames_per_class: usize,
    pub n_subcarriers: usize,
    pub oversampling: usize,
    pub es_n0_db: f64,
    pub profile: ChannelProfile,
    pub master_seed: u64,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self {
            type_set: TypeSet::TypeII,
            class_alphas: None,
            frames_per_class: 2000,
            n_subcarriers: 256,
            oversampling: 8,
            es_n0_db: 20.0,
            profile: ChannelProfile::table1(),
            master_seed: 0,
        }
    }
}

impl DatasetConfig {
    pub fn class_alphas(&self) -> Vec<f64> {
        self.class_alphas.clone().unwrap_or_else(|| self.type_set.alphas())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetFile {
    pub class_index: u32,
    pub alpha_target: f64,
    pub alpha_effective: f64,
    pub data_file: String,
    pub manifest_file: String,
    /// Global index of this class's first frame.
    pub first_frame_index: usize,
}

/// Top-level description of an exported dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub type_set: TypeSet,
    pub class_labels: Vec<f64>,
    pub frames_per_class: usize,
    pub total_frames: usize,
    pub n_subcarriers: usize,
    pub oversampling: usize,
    pub samples_per_frame: usize,
    pub es_n0_db: f64,
    pub channel: String,
    pub sample_format: String,
    pub master_seed: u64,
    pub labels_file: String,
    pub files: Vec<DatasetFile>,
}

pub const LABELS_CSV_HEADER: &str = "frame_index,class_index,alpha_target,alpha_effective";

/// One labelled frame: random payload, fading, CFO, then AWGN at the
/// configured Es/N0 (referenced to the transmitted symbol energy). The
/// convolution tail is dropped so every frame keeps `N * rho` samples.
fn class_frame(
    cfg: &DatasetConfig,
    wave: &WaveformConfig,
    tx: &Modulator,
    class: u32,
    frame: usize,
) -> Result<IqFrame> {
    let path = |s: u64| derive_seed(cfg.master_seed, &[stream::DATASET, s, class as u64, frame as u64]);
    let bits = random_bits(2 * wave.n_subcarriers(), path(stream::BITS));
    let samples = tx.modulate(&qpsk_map(&bits)?)?;
    let mut meta = wave.frame_meta(path(stream::NOISE));
    meta.class_label = Some(class);
    let clean = IqFrame::new(samples, meta);
    let variance = noise_variance(&clean, NoiseSpec::new(cfg.es_n0_db));
    let (faded, _) = rician_multipath(&clean, &cfg.profile, path(stream::FADING))?;
    let mut out = add_noise(&apply_cfo(&faded, &cfg.profile), variance, path(stream::NOISE))?;
    out.samples.truncate(clean.len());
    out.meta.es_n0_db = Some(cfg.es_n0_db);
    Ok(out)
}

/// Writes one `.iq`/`.json` pair per class, `labels.csv` and
/// `dataset.json` into `out_dir`.
pub fn export_dataset(cfg: &DatasetConfig, out_dir: &Path) -> Result<DatasetManifest> {
    let alphas = cfg.class_alphas();
    if alphas.is_empty() || cfg.frames_per_class == 0 {
        return invalid("dataset needs at least one class and one frame per class");
    }
    for (i, a) in alphas.iter().enumerate() {
        if alphas[..i].contains(a) {
            return invalid(format!("duplicate class alpha {a}"));
        }
    }
    cfg.profile.validate()?;
    std::fs::create_dir_all(out_dir)?;

    let mut labels = BufWriter::new(File::create(out_dir.join("labels.csv"))?);
    writeln!(labels, "{LABELS_CSV_HEADER}")?;
    let mut files = Vec::with_capacity(alphas.len());
    let mut samples_per_frame = 0;
    for (class, &alpha) in alphas.iter().enumerate() {
        let class = class as u32;
        let wave = WaveformConfig::new(cfg.n_subcarriers, alpha, cfg.oversampling)?;
        let tx = Modulator::for_config(&wave)?;
        let frames = (0..cfg.frames_per_class)
            .map(|f| class_frame(cfg, &wave, &tx, class, f))
            .collect::<Result<Vec<_>>>()?;
        samples_per_frame = wave.samples_per_frame();

        let stem = format!("class_{class}");
        let data_file = format!("{stem}.iq");
        let manifest_file = format!("{stem}.json");
        let manifest = write_frames(&out_dir.join(&data_file), &out_dir.join(&manifest_file), &frames)?;
        let mut manifest = IqManifest {
            alpha_target: Some(alpha),
            data_file: Some(data_file.clone()),
            ..manifest
        };
        manifest.es_n0_db = Some(cfg.es_n0_db);
        manifest.write(&out_dir.join(&manifest_file))?;

        let first = class as usize * cfg.frames_per_class;
        for f in 0..cfg.frames_per_class {
            writeln!(labels, "{},{},{},{}", first + f, class, alpha, wave.alpha_effective())?;
        }
        files.push(DatasetFile {
            class_index: class,
            alpha_target: alpha,
            alpha_effective: wave.alpha_effective(),
            data_file,
            manifest_file,
            first_frame_index: first,
        });
    }
    labels.flush()?;

    let manifest = DatasetManifest {
        type_set: cfg.type_set,
        class_labels: alphas.clone(),
        frames_per_class: cfg.frames_per_class,
        total_frames: alphas.len() * cfg.frames_per_class,
        n_subcarriers: cfg.n_subcarriers,
        oversampling: cfg.oversampling,
        samples_per_frame,
        es_n0_db: cfg.es_n0_db,
        channel: "table1_fading".into(),
        sample_format: "complex64 little-endian interleaved f32 (re, im)".into(),
        master_seed: cfg.master_seed,
        labels_file: "labels.csv".into(),
        files,
    };
    let mut w = BufWriter::new(File::create(out_dir.join("dataset.json"))?);
    serde_json::to_writer_pretty(&mut w, &manifest)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(manifest)
}
