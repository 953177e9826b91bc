//! Receivers: matched filter, exhaustive ML, sphere decoding and block
//! (multi-band) sphere decoding.
//!
//! Every detector works on the retained-sample observation
//! `y = Phi s + w` with white `w`, and reports how many tree nodes it
//! entered. Detector objects cache their carrier models and can be shared
//! across threads; the free functions build a fresh detector per call.

mod model;
mod multisd;
mod sphere;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::iq::IqFrame;
use crate::qpsk::{qpsk_demap_hard, qpsk_slice, SymbolVector, QPSK_AMPLITUDE};
use crate::waveform::{Modulator, WaveformConfig};

pub use model::{ObservationModel, TreeModel};
pub use multisd::{MultiSdDetector, MultiSdOptions, MultiSdTrace, MAX_BAND_SIZE};
pub use sphere::{full_tree_nodes, sphere_search, RadiusPolicy, SearchOutcome};

/// Exhaustive ML refuses more subcarriers than this (4^N candidates).
pub const ML_MAX_SUBCARRIERS: usize = 10;
/// Sphere decoding refuses more subcarriers than this.
pub const SD_MAX_SUBCARRIERS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DetectorId {
    #[serde(rename = "MF")]
    Mf,
    #[serde(rename = "ML")]
    Ml,
    #[serde(rename = "SD")]
    Sd,
    #[serde(rename = "MultiSD")]
    MultiSd,
}

impl fmt::Display for DetectorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DetectorId::Mf => "MF",
            DetectorId::Ml => "ML",
            DetectorId::Sd => "SD",
            DetectorId::MultiSd => "MultiSD",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    pub bits: Vec<u8>,
    pub symbols: SymbolVector,
    pub visited_nodes: u64,
    pub detector: DetectorId,
    pub alpha_used: f64,
}

impl DetectionResult {
    fn new(symbols: SymbolVector, visited_nodes: u64, detector: DetectorId, alpha_used: f64) -> Self {
        Self {
            bits: qpsk_demap_hard(&symbols),
            symbols,
            visited_nodes,
            detector,
            alpha_used,
        }
    }
}

fn check_len(frame: &IqFrame, expected: usize) -> Result<()> {
    if frame.len() != expected {
        return invalid(format!(
            "frame has {} samples, detector expects {expected}",
            frame.len()
        ));
    }
    Ok(())
}

/// Projection onto the conjugate carriers, scaled so an orthogonal noiseless
/// frame returns its symbols exactly (and a compressed one returns `C s`).
#[derive(Debug, Clone)]
pub struct MatchedFilter {
    modulator: Modulator,
    alpha: f64,
}

impl MatchedFilter {
    pub fn new(cfg: &WaveformConfig) -> Result<Self> {
        Ok(Self {
            modulator: Modulator::for_config(cfg)?,
            alpha: cfg.alpha_effective(),
        })
    }

    pub fn soft(&self, frame: &IqFrame) -> Result<Vec<Complex64>> {
        check_len(frame, self.modulator.layout().retained())?;
        let mut z = self.modulator.correlate(&frame.samples)?;
        let inv = 1.0 / self.alpha;
        z.iter_mut().for_each(|x| *x *= inv);
        Ok(z)
    }

    pub fn detect(&self, frame: &IqFrame) -> Result<DetectionResult> {
        let symbols = qpsk_slice(&self.soft(frame)?);
        Ok(DetectionResult::new(symbols, 0, DetectorId::Mf, self.alpha))
    }
}

pub fn matched_filter_demod(frame: &IqFrame, cfg: &WaveformConfig) -> Result<Vec<Complex64>> {
    MatchedFilter::new(cfg)?.soft(frame)
}

/// Matched filter followed by hard QPSK slicing.
pub fn mf_hard_detect(frame: &IqFrame, cfg: &WaveformConfig) -> Result<DetectionResult> {
    MatchedFilter::new(cfg)?.detect(frame)
}

/// Brute-force minimum-distance search over all `4^N` QPSK vectors.
#[derive(Debug, Clone)]
pub struct MlDetector {
    columns: Vec<Vec<Complex64>>,
    alpha: f64,
}

impl MlDetector {
    pub fn new(cfg: &WaveformConfig) -> Result<Self> {
        let n = cfg.n_subcarriers();
        if n > ML_MAX_SUBCARRIERS {
            return Err(Error::Capacity {
                detector: "ML",
                requested: n,
                limit: ML_MAX_SUBCARRIERS,
            });
        }
        let layout = cfg.layout()?;
        Ok(Self {
            columns: (0..n).map(|i| layout.carrier_column(i)).collect(),
            alpha: cfg.alpha_effective(),
        })
    }

    pub fn detect(&self, frame: &IqFrame) -> Result<DetectionResult> {
        let n = self.columns.len();
        let k = self.columns.first().map_or(0, Vec::len);
        check_len(frame, k)?;
        let alphabet = [
            Complex64::new(QPSK_AMPLITUDE, QPSK_AMPLITUDE),
            Complex64::new(-QPSK_AMPLITUDE, QPSK_AMPLITUDE),
            Complex64::new(QPSK_AMPLITUDE, -QPSK_AMPLITUDE),
            Complex64::new(-QPSK_AMPLITUDE, -QPSK_AMPLITUDE),
        ];
        let total = 1u64 << (2 * n);
        let mut best = (f64::INFINITY, 0u64);
        let mut x = vec![Complex64::new(0.0, 0.0); k];
        for cand in 0..total {
            x.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            for (i, col) in self.columns.iter().enumerate() {
                let s = alphabet[((cand >> (2 * i)) & 3) as usize];
                for (v, c) in x.iter_mut().zip(col) {
                    *v += c * s;
                }
            }
            let metric: f64 = frame
                .samples
                .iter()
                .zip(&x)
                .map(|(y, v)| (y - v).norm_sqr())
                .sum();
            if metric < best.0 {
                best = (metric, cand);
            }
        }
        let symbols = (0..n)
            .map(|i| alphabet[((best.1 >> (2 * i)) & 3) as usize])
            .collect();
        Ok(DetectionResult::new(
            SymbolVector::new(symbols)?,
            total,
            DetectorId::Ml,
            self.alpha,
        ))
    }
}

pub fn ml_detect(frame: &IqFrame, cfg: &WaveformConfig) -> Result<DetectionResult> {
    MlDetector::new(cfg)?.detect(frame)
}

/// Sphere decoder over the real-valued decomposition of the whole symbol.
#[derive(Debug, Clone)]
pub struct SphereDetector {
    model: ObservationModel,
    policy: RadiusPolicy,
}

impl SphereDetector {
    pub fn new(cfg: &WaveformConfig, policy: RadiusPolicy) -> Result<Self> {
        let n = cfg.n_subcarriers();
        if n > SD_MAX_SUBCARRIERS {
            return Err(Error::Capacity {
                detector: "SD",
                requested: n,
                limit: SD_MAX_SUBCARRIERS,
            });
        }
        Ok(Self {
            model: ObservationModel::new(cfg)?,
            policy,
        })
    }

    pub fn model(&self) -> &ObservationModel {
        &self.model
    }

    pub fn search(&self, frame: &IqFrame) -> Result<SearchOutcome> {
        check_len(frame, self.model.samples())?;
        let z = self.model.tree().project(&frame.samples);
        Ok(sphere_search(self.model.tree(), &z, QPSK_AMPLITUDE, self.policy))
    }

    pub fn detect(&self, frame: &IqFrame) -> Result<DetectionResult> {
        let out = self.search(frame)?;
        let symbols = SymbolVector::new(model::from_real(&out.point))?;
        Ok(DetectionResult::new(
            symbols,
            out.visited,
            DetectorId::Sd,
            self.model.alpha(),
        ))
    }
}

pub fn sphere_detect(frame: &IqFrame, cfg: &WaveformConfig, policy: RadiusPolicy) -> Result<DetectionResult> {
    SphereDetector::new(cfg, policy)?.detect(frame)
}

pub fn multisd_detect(frame: &IqFrame, cfg: &WaveformConfig, policy: RadiusPolicy) -> Result<DetectionResult> {
    let opts = MultiSdOptions {
        policy,
        ..MultiSdOptions::default()
    };
    MultiSdDetector::new(cfg, opts)?.detect(frame)
}

/// Any of the four receivers behind one interface.
#[derive(Debug, Clone)]
pub enum Detector {
    Mf(MatchedFilter),
    Ml(MlDetector),
    Sd(SphereDetector),
    MultiSd(MultiSdDetector),
}

impl Detector {
    pub fn build(id: DetectorId, cfg: &WaveformConfig, multisd: MultiSdOptions) -> Result<Self> {
        Ok(match id {
            DetectorId::Mf => Detector::Mf(MatchedFilter::new(cfg)?),
            DetectorId::Ml => Detector::Ml(MlDetector::new(cfg)?),
            DetectorId::Sd => Detector::Sd(SphereDetector::new(cfg, multisd.policy)?),
            DetectorId::MultiSd => Detector::MultiSd(MultiSdDetector::new(cfg, multisd)?),
        })
    }

    pub fn detect(&self, frame: &IqFrame) -> Result<DetectionResult> {
        match self {
            Detector::Mf(d) => d.detect(frame),
            Detector::Ml(d) => d.detect(frame),
            Detector::Sd(d) => d.detect(frame),
            Detector::MultiSd(d) => d.detect(frame),
        }
    }
}
