//! Monte-Carlo drivers: BER curves, the scaling and tuning defences,
//! classifier dataset export and replay of predicted labels.
//!
//! Every stochastic step draws from a stream derived from the master seed
//! and the frame's indices, so outputs are pure functions of the config.

mod ber;
mod dataset;
mod replay;
mod scaling;
mod tuning;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{
    add_noise, equalize_with_taps, noise_variance, rician_multipath, ChannelProfile, NoiseSpec,
};
use crate::detect::{DetectionResult, Detector, DetectorId, MultiSdOptions};
use crate::error::{invalid, Result};
use crate::iq::IqFrame;
use crate::qpsk::qpsk_map;
use crate::rng::rng_from;
use crate::waveform::{BandPlan, Modulator, WaveformConfig};

pub use ber::{run_ber, write_ber_csv, BerCurve, BerPoint, BER_CSV_HEADER};
pub use dataset::{export_dataset, DatasetConfig, DatasetFile, DatasetManifest, TypeSet};
pub use replay::{read_predictions, replay_predictions, Prediction, ReplayClass, ReplayConfig, ReplayReport};
pub use scaling::{run_scaling_defence, ScalingConfig, ScalingReport, SdRefusal};
pub use tuning::{run_tuning_defence, TuningConfig, TuningReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelMode {
    #[default]
    Awgn,
    /// Reference multipath fading plus AWGN, equalised with the realised taps.
    Table1Fading,
}

/// One BER experiment: a signal, a receiver, a channel and an Es/N0 grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub waveform: WaveformConfig,
    pub detector: DetectorId,
    /// Compression the receiver assumes; defaults to the signal's own.
    #[serde(default)]
    pub detector_alpha: Option<f64>,
    #[serde(default)]
    pub channel: ChannelMode,
    pub es_n0_grid_db: Vec<f64>,
    #[serde(default = "default_min_bit_errors")]
    pub min_bit_errors: u64,
    pub max_frames: u64,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub multisd: MultiSdOptions,
}

fn default_min_bit_errors() -> u64 {
    100
}

impl Default for ExperimentConfig {
    /// Sphere decoding of a 12-subcarrier, alpha = 0.8 signal in AWGN.
    fn default() -> Self {
        let mut cfg = Self::new(
            WaveformConfig::new(12, 0.8, 8).expect("valid default waveform"),
            DetectorId::Sd,
            (0..=14).map(f64::from).collect(),
        );
        cfg.max_frames = 20_000;
        cfg
    }
}

impl ExperimentConfig {
    pub fn new(waveform: WaveformConfig, detector: DetectorId, es_n0_grid_db: Vec<f64>) -> Self {
        Self {
            waveform,
            detector,
            detector_alpha: None,
            channel: ChannelMode::Awgn,
            es_n0_grid_db,
            min_bit_errors: default_min_bit_errors(),
            max_frames: 1000,
            master_seed: 0,
            multisd: MultiSdOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.es_n0_grid_db.is_empty() {
            return invalid("Es/N0 grid is empty");
        }
        if self.es_n0_grid_db.iter().any(|x| x.is_nan() || *x == f64::NEG_INFINITY) {
            return invalid("Es/N0 grid contains NaN or -inf");
        }
        if self.max_frames == 0 {
            return invalid("max_frames must be positive");
        }
        if let Some(a) = self.detector_alpha {
            if !(a > 0.0 && a <= 1.0) {
                return invalid(format!("detector alpha {a} outside (0, 1]"));
            }
        }
        Ok(())
    }

    pub fn detector_alpha(&self) -> f64 {
        self.detector_alpha.unwrap_or(self.waveform.alpha_target())
    }

    /// The waveform the receiver believes it is seeing.
    pub fn detector_waveform(&self) -> Result<WaveformConfig> {
        self.waveform.with_alpha(self.detector_alpha())
    }
}

/// Multi-band waveform used by the MultiSD experiments.
pub fn banded_waveform(
    n_subcarriers: usize,
    alpha: f64,
    oversampling: usize,
    band_size: usize,
    guard: usize,
) -> Result<WaveformConfig> {
    WaveformConfig::new(n_subcarriers, alpha, oversampling)?
        .with_band_plan(BandPlan::uniform(n_subcarriers, band_size, guard)?)
}

pub(crate) fn random_bits(n_bits: usize, seed: u64) -> Vec<u8> {
    let mut rng = rng_from(seed);
    (0..n_bits).map(|_| rng.random::<bool>() as u8).collect()
}

/// Transmitter, channel and receiver of one experiment, built once.
pub(crate) struct Link {
    tx: Modulator,
    signal: WaveformConfig,
    rx: Detector,
    channel: ChannelMode,
    profile: ChannelProfile,
}

impl Link {
    pub(crate) fn new(
        signal: &WaveformConfig,
        detector: DetectorId,
        detector_waveform: &WaveformConfig,
        channel: ChannelMode,
        multisd: MultiSdOptions,
    ) -> Result<Self> {
        Ok(Self {
            tx: Modulator::for_config(signal)?,
            signal: signal.clone(),
            rx: Detector::build(detector, detector_waveform, multisd)?,
            channel,
            profile: ChannelProfile::table1(),
        })
    }

    pub(crate) fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        Self::new(
            &cfg.waveform,
            cfg.detector,
            &cfg.detector_waveform()?,
            cfg.channel,
            cfg.multisd,
        )
    }

    pub(crate) fn bits_per_frame(&self) -> usize {
        2 * self.signal.n_subcarriers()
    }

    pub(crate) fn modulate(&self, bits: &[u8], seed: u64) -> Result<IqFrame> {
        let symbols = qpsk_map(bits)?;
        let samples: Vec<Complex64> = self.tx.modulate(&symbols)?;
        Ok(IqFrame::new(samples, self.signal.frame_meta(seed)))
    }

    /// Sends `bits` at `es_n0_db` and returns the receiver's decisions.
    pub(crate) fn run(&self, bits: &[u8], es_n0_db: f64, noise_seed: u64, fading_seed: u64) -> Result<DetectionResult> {
        let tx = self.modulate(bits, noise_seed)?;
        let variance = noise_variance(&tx, NoiseSpec::new(es_n0_db));
        let rx = match self.channel {
            ChannelMode::Awgn => add_noise(&tx, variance, noise_seed)?,
            ChannelMode::Table1Fading => {
                let (faded, trace) = rician_multipath(&tx, &self.profile, fading_seed)?;
                equalize_with_taps(&add_noise(&faded, variance, noise_seed)?, &trace)
            }
        };
        self.rx.detect(&rx)
    }
}

pub(crate) fn count_errors(sent: &[u8], got: &[u8]) -> u64 {
    sent.iter().zip(got).filter(|(a, b)| a != b).count() as u64
}
