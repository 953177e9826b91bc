use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::{banded_waveform, run_ber, BerCurve, ChannelMode, ExperimentConfig};
use crate::complexity::{log2_big, sd_upper_bound_ops};
use crate::detect::{DetectorId, MultiSdOptions, SphereDetector};
use crate::error::{Error, Result};
use crate::waveform::WaveformConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingConfig {
    pub alpha: f64,
    pub oversampling: usize,
    pub n_small: usize,
    pub n_large: usize,
    pub band_size: usize,
    pub guard_subcarriers: usize,
    /// Worst-case multiplication budget above which SD is not run.
    pub op_budget: f64,
    pub es_n0_grid_small_db: Vec<f64>,
    pub es_n0_grid_large_db: Vec<f64>,
    pub channel: ChannelMode,
    pub min_bit_errors: u64,
    pub max_frames_small: u64,
    pub max_frames_large: u64,
    pub master_seed: u64,
    pub multisd: MultiSdOptions,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self {
            alpha: 0.8,
            oversampling: 8,
            n_small: 12,
            n_large: 256,
            band_size: 8,
            guard_subcarriers: 2,
            op_budget: 1e12,
            es_n0_grid_small_db: (0..=14).map(f64::from).chain([20.0, 25.0, 30.0]).collect(),
            es_n0_grid_large_db: vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
            channel: ChannelMode::Awgn,
            min_bit_errors: 100,
            max_frames_small: 20_000,
            max_frames_large: 300,
            master_seed: 0,
            multisd: MultiSdOptions::default(),
        }
    }
}

/// Why SD was not run on the large signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdRefusal {
    pub n_subcarriers: usize,
    /// Capacity-guard message, if the detector refused to build.
    pub guard_error: Option<String>,
    /// Exact worst-case counts, as decimal strings.
    pub sd_multiplications: String,
    pub sd_additions: String,
    pub sd_multiplications_log2: f64,
    pub op_budget: f64,
    pub exceeds_budget: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    /// Orthogonal reference at the small size (MF at alpha = 1).
    pub small_reference: BerCurve,
    pub small_sd: BerCurve,
    pub small_mf: BerCurve,
    pub large_mf: BerCurve,
    pub large_multisd: BerCurve,
    pub large_sd: SdRefusal,
}

fn budget_exceeded(ops: &BigUint, budget: f64) -> bool {
    // budgets beyond 2^1023 are not meaningful; compare in the log domain
    budget.is_nan() || log2_big(ops) > budget.log2()
}

pub fn run_scaling_defence(cfg: &ScalingConfig) -> Result<ScalingReport> {
    let small = |alpha: f64, detector: DetectorId| -> Result<BerCurve> {
        let mut exp = ExperimentConfig::new(
            WaveformConfig::new(cfg.n_small, alpha, cfg.oversampling)?,
            detector,
            cfg.es_n0_grid_small_db.clone(),
        );
        exp.channel = cfg.channel;
        exp.min_bit_errors = cfg.min_bit_errors;
        exp.max_frames = cfg.max_frames_small;
        exp.master_seed = cfg.master_seed;
        exp.multisd = cfg.multisd;
        run_ber(&exp)
    };
    let small_reference = small(1.0, DetectorId::Mf)?;
    let small_sd = small(cfg.alpha, DetectorId::Sd)?;
    let small_mf = small(cfg.alpha, DetectorId::Mf)?;

    let large_signal = banded_waveform(
        cfg.n_large,
        cfg.alpha,
        cfg.oversampling,
        cfg.band_size,
        cfg.guard_subcarriers,
    )?;
    let guard_error = match SphereDetector::new(&large_signal.without_band_plan(), cfg.multisd.policy) {
        Err(e @ Error::Capacity { .. }) => Some(e.to_string()),
        Err(e) => return Err(e),
        Ok(_) => None,
    };
    let ops = sd_upper_bound_ops(cfg.n_large)?;
    let large_sd = SdRefusal {
        n_subcarriers: cfg.n_large,
        guard_error,
        sd_multiplications: ops.multiplications.to_string(),
        sd_additions: ops.additions.to_string(),
        sd_multiplications_log2: log2_big(&ops.multiplications),
        op_budget: cfg.op_budget,
        exceeds_budget: budget_exceeded(&ops.multiplications, cfg.op_budget),
    };

    let large = |detector: DetectorId| -> Result<BerCurve> {
        let mut exp = ExperimentConfig::new(large_signal.clone(), detector, cfg.es_n0_grid_large_db.clone());
        exp.channel = cfg.channel;
        exp.min_bit_errors = cfg.min_bit_errors;
        exp.max_frames = cfg.max_frames_large;
        exp.master_seed = cfg.master_seed;
        exp.multisd = cfg.multisd;
        run_ber(&exp)
    };
    Ok(ScalingReport {
        small_reference,
        small_sd,
        small_mf,
        large_mf: large(DetectorId::Mf)?,
        large_multisd: large(DetectorId::MultiSd)?,
        large_sd,
    })
}
