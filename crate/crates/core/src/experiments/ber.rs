use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{count_errors, random_bits, ExperimentConfig, Link};
use crate::detect::DetectorId;
use crate::error::Result;
use crate::rng::{derive_seed, stream};

pub const BER_CSV_HEADER: &str = "esn0_db,bits,errors,ber";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerPoint {
    pub es_n0_db: f64,
    pub bits_sent: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub frames: u64,
    /// Fewer than `min_bit_errors` errors were seen before `max_frames`.
    pub low_confidence: bool,
    /// Mean tree nodes entered per frame.
    pub mean_visited_nodes: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerCurve {
    pub label: String,
    pub detector: DetectorId,
    pub signal_alpha: f64,
    pub detector_alpha: f64,
    pub n_subcarriers: usize,
    pub points: Vec<BerPoint>,
}

impl BerCurve {
    pub fn point_at(&self, es_n0_db: f64) -> Option<&BerPoint> {
        self.points.iter().find(|p| p.es_n0_db == es_n0_db)
    }

    /// Es/N0 at which the curve crosses `target`, interpolating `log10(BER)`
    /// linearly between grid points. `None` if it never does.
    pub fn es_n0_at_ber(&self, target: f64) -> Option<f64> {
        self.points.windows(2).find_map(|w| {
            let (a, b) = (&w[0], &w[1]);
            if a.ber >= target && b.ber <= target && a.ber > 0.0 {
                if b.ber == 0.0 || a.ber == b.ber {
                    return Some(b.es_n0_db);
                }
                let t = (a.ber.log10() - target.log10()) / (a.ber.log10() - b.ber.log10());
                Some(a.es_n0_db + t * (b.es_n0_db - a.es_n0_db))
            } else {
                None
            }
        })
    }
}

/// Simulates every Es/N0 point of `cfg`.
///
/// Frame `f` carries the same payload (and fading draw) at every point;
/// only the noise stream depends on the Es/N0 value.
pub fn run_ber(cfg: &ExperimentConfig) -> Result<BerCurve> {
    let link = Link::from_config(cfg)?;
    let bits_per_frame = link.bits_per_frame();
    let seed = cfg.master_seed;
    let mut points = Vec::with_capacity(cfg.es_n0_grid_db.len());
    for &es_n0 in &cfg.es_n0_grid_db {
        let (mut errors, mut frames, mut visited) = (0u64, 0u64, 0u64);
        while frames < cfg.max_frames && errors < cfg.min_bit_errors {
            let bits = random_bits(bits_per_frame, derive_seed(seed, &[stream::BITS, frames]));
            let noise_seed = derive_seed(seed, &[stream::NOISE, es_n0.to_bits(), frames]);
            let fading_seed = derive_seed(seed, &[stream::FADING, frames]);
            let out = link.run(&bits, es_n0, noise_seed, fading_seed)?;
            errors += count_errors(&bits, &out.bits);
            visited += out.visited_nodes;
            frames += 1;
        }
        let bits_sent = frames * bits_per_frame as u64;
        points.push(BerPoint {
            es_n0_db: es_n0,
            bits_sent,
            bit_errors: errors,
            ber: errors as f64 / bits_sent as f64,
            frames,
            low_confidence: errors < cfg.min_bit_errors,
            mean_visited_nodes: visited as f64 / frames as f64,
        });
    }
    let detector_alpha = cfg.detector_waveform()?.alpha_effective();
    Ok(BerCurve {
        label: format!("{} alpha={}", cfg.detector, cfg.detector_alpha()),
        detector: cfg.detector,
        signal_alpha: cfg.waveform.alpha_effective(),
        detector_alpha,
        n_subcarriers: cfg.waveform.n_subcarriers(),
        points,
    })
}

pub fn write_ber_csv<W: Write>(mut w: W, curve: &BerCurve) -> Result<()> {
    writeln!(w, "{BER_CSV_HEADER}")?;
    for p in &curve.points {
        writeln!(w, "{},{},{},{:e}", p.es_n0_db, p.bits_sent, p.bit_errors, p.ber)?;
    }
    Ok(())
}
