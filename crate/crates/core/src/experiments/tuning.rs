use serde::{Deserialize, Serialize};

use super::{banded_waveform, run_ber, BerCurve, ChannelMode, ExperimentConfig};
use crate::detect::{DetectorId, MultiSdOptions};
use crate::error::{invalid, Result};

/// A fixed-compression multi-band signal attacked by receivers that assume
/// other compression factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TuningConfig {
    pub n_subcarriers: usize,
    pub oversampling: usize,
    pub band_size: usize,
    pub guard_subcarriers: usize,
    pub target_alpha: f64,
    /// MultiSD receivers, one curve each (the matched one included).
    pub detector_alphas: Vec<f64>,
    /// Matched-filter receivers, one curve each.
    pub mf_alphas: Vec<f64>,
    pub channel: ChannelMode,
    pub es_n0_grid_db: Vec<f64>,
    pub min_bit_errors: u64,
    pub max_frames: u64,
    pub master_seed: u64,
    pub multisd: MultiSdOptions,
}

impl Default for TuningConfig {
    fn default() -> Self {
        Self {
            n_subcarriers: 256,
            oversampling: 8,
            band_size: 8,
            guard_subcarriers: 2,
            target_alpha: 0.8,
            detector_alphas: vec![0.9, 0.85, 0.8, 0.75, 0.7],
            mf_alphas: vec![1.0, 0.8],
            channel: ChannelMode::Awgn,
            es_n0_grid_db: vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
            min_bit_errors: 100,
            max_frames: 200,
            master_seed: 0,
            multisd: MultiSdOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningReport {
    pub target_alpha: f64,
    pub curves: Vec<BerCurve>,
}

impl TuningReport {
    pub fn matched(&self) -> Option<&BerCurve> {
        self.curves
            .iter()
            .find(|c| c.detector == DetectorId::MultiSd && c.detector_alpha == c.signal_alpha)
    }

    /// Curve with the lowest BER at `es_n0_db`; ties go to the earliest.
    pub fn argmin_at(&self, es_n0_db: f64) -> Option<&BerCurve> {
        self.curves
            .iter()
            .filter_map(|c| c.point_at(es_n0_db).map(|p| (c, p.ber)))
            .fold(None, |best: Option<(&BerCurve, f64)>, (c, b)| match best {
                Some((_, bb)) if bb <= b => best,
                _ => Some((c, b)),
            })
            .map(|(c, _)| c)
    }
}

/// Runs the same signal (same payloads and noise) past every receiver.
pub fn run_tuning_defence(cfg: &TuningConfig) -> Result<TuningReport> {
    if cfg.detector_alphas.is_empty() && cfg.mf_alphas.is_empty() {
        return invalid("no receivers to evaluate");
    }
    let signal = banded_waveform(
        cfg.n_subcarriers,
        cfg.target_alpha,
        cfg.oversampling,
        cfg.band_size,
        cfg.guard_subcarriers,
    )?;
    let receivers = cfg
        .detector_alphas
        .iter()
        .map(|&a| (DetectorId::MultiSd, a))
        .chain(cfg.mf_alphas.iter().map(|&a| (DetectorId::Mf, a)));
    let mut curves = Vec::new();
    for (detector, alpha) in receivers {
        let exp = ExperimentConfig {
            waveform: signal.clone(),
            detector,
            detector_alpha: Some(alpha),
            channel: cfg.channel,
            es_n0_grid_db: cfg.es_n0_grid_db.clone(),
            min_bit_errors: cfg.min_bit_errors,
            max_frames: cfg.max_frames,
            master_seed: cfg.master_seed,
            multisd: cfg.multisd,
        };
        curves.push(run_ber(&exp)?);
    }
    Ok(TuningReport {
        target_alpha: cfg.target_alpha,
        curves,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_tuning_run_labels_curves() {
        let cfg = TuningConfig {
            n_subcarriers: 16,
            oversampling: 4,
            band_size: 4,
            detector_alphas: vec![0.9, 0.8],
            mf_alphas: vec![1.0],
            es_n0_grid_db: vec![f64::INFINITY],
            max_frames: 10,
            ..TuningConfig::default()
        };
        let report = run_tuning_defence(&cfg).unwrap();
        assert_eq!(report.curves.len(), 3);
        let matched = report.matched().unwrap();
        assert_eq!(matched.points[0].bit_errors, 0);
        assert_eq!(report.argmin_at(f64::INFINITY).unwrap().label, matched.label);
        assert_eq!(report.curves[2].detector, DetectorId::Mf);
    }
}
