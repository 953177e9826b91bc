//! Block sphere decoding over a multi-band layout.
//!
//! Each band is projected onto its own carriers and sphere-decoded at
//! dimension `2 * band_size`. Leakage from the other bands is then removed
//! by parallel interference cancellation: every band is re-decoded against
//! the observation minus the current estimate of all other bands. Passes
//! stop early once no decision changes. All bands within a pass read the
//! same previous estimate, so the result does not depend on band order.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::model::{from_real, TreeModel};
use super::sphere::{sphere_search, RadiusPolicy};
use super::{check_len, DetectionResult, DetectorId};
use crate::error::{Error, Result};
use crate::iq::IqFrame;
use crate::qpsk::{SymbolVector, QPSK_AMPLITUDE};
use crate::waveform::{BandPlan, Modulator, WaveformConfig};

/// Largest band a MultiSD detector will decode.
pub const MAX_BAND_SIZE: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct MultiSdOptions {
    pub policy: RadiusPolicy,
    /// Interference-cancellation passes after the first per-band pass.
    pub cancellation_passes: usize,
}

impl Default for MultiSdOptions {
    fn default() -> Self {
        Self {
            policy: RadiusPolicy::BabaiShrink,
            cancellation_passes: 2,
        }
    }
}

#[derive(Debug, Clone)]
struct Band {
    range: std::ops::Range<usize>,
    tree: TreeModel,
}

#[derive(Debug, Clone)]
pub struct MultiSdDetector {
    plan: BandPlan,
    bands: Vec<Band>,
    modulator: Modulator,
    alpha: f64,
    options: MultiSdOptions,
}

/// Per-pass instrumentation of one detection.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiSdTrace {
    pub result: DetectionResult,
    pub visited_per_pass: Vec<u64>,
}

impl MultiSdDetector {
    pub fn new(cfg: &WaveformConfig, options: MultiSdOptions) -> Result<Self> {
        let plan = *cfg
            .band_plan()
            .ok_or_else(|| Error::BandPlan("MultiSD needs a band plan".into()))?;
        if plan.band_size > MAX_BAND_SIZE {
            return Err(Error::Capacity {
                detector: "MultiSD band",
                requested: plan.band_size,
                limit: MAX_BAND_SIZE,
            });
        }
        let layout = cfg.layout()?;
        let bands = (0..plan.n_bands)
            .map(|b| {
                let range = plan.band_range(b);
                let columns: Vec<Vec<Complex64>> =
                    range.clone().map(|n| layout.carrier_column(n)).collect();
                Band {
                    tree: TreeModel::from_columns(&columns),
                    range,
                }
            })
            .collect();
        Ok(Self {
            plan,
            bands,
            modulator: Modulator::new(layout),
            alpha: cfg.alpha_effective(),
            options,
        })
    }

    pub fn band_plan(&self) -> &BandPlan {
        &self.plan
    }

    pub fn detect(&self, frame: &IqFrame) -> Result<DetectionResult> {
        Ok(self.detect_traced(frame)?.result)
    }

    pub fn detect_traced(&self, frame: &IqFrame) -> Result<MultiSdTrace> {
        check_len(frame, self.modulator.layout().retained())?;
        let n = self.plan.total_subcarriers();
        let mut estimate = vec![0.0f64; 2 * n];
        let mut visited_per_pass = Vec::new();

        let mut pass_visited = 0u64;
        for band in &self.bands {
            let z = band.tree.project(&frame.samples);
            let out = sphere_search(&band.tree, &z, QPSK_AMPLITUDE, self.options.policy);
            pass_visited += out.visited;
            estimate[2 * band.range.start..2 * band.range.end].copy_from_slice(&out.point);
        }
        visited_per_pass.push(pass_visited);

        let passes = if self.bands.len() > 1 {
            self.options.cancellation_passes
        } else {
            0
        };
        for _ in 0..passes {
            let rebuilt = self.modulator.modulate(&from_real(&estimate))?;
            let residual: Vec<Complex64> = frame
                .samples
                .iter()
                .zip(&rebuilt)
                .map(|(y, x)| y - x)
                .collect();
            let mut next = estimate.clone();
            let mut pass_visited = 0u64;
            for band in &self.bands {
                let own = &estimate[2 * band.range.start..2 * band.range.end];
                // Q_b^T (y - others) = Q_b^T (y - all) + R_b * own
                let mut z = band.tree.project(&residual);
                for (zi, ri) in z.iter_mut().zip(band.tree.apply_r(own)) {
                    *zi += ri;
                }
                let out = sphere_search(&band.tree, &z, QPSK_AMPLITUDE, self.options.policy);
                pass_visited += out.visited;
                next[2 * band.range.start..2 * band.range.end].copy_from_slice(&out.point);
            }
            visited_per_pass.push(pass_visited);
            let changed = next != estimate;
            estimate = next;
            if !changed {
                break;
            }
        }

        let symbols = SymbolVector::new(from_real(&estimate))?;
        Ok(MultiSdTrace {
            result: DetectionResult::new(
                symbols,
                visited_per_pass.iter().sum(),
                DetectorId::MultiSd,
                self.alpha,
            ),
            visited_per_pass,
        })
    }
}
