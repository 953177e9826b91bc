//! Self-created inter-carrier interference: per-sample power decomposition
//! and the subcarrier correlation operator.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::waveform::{CarrierLayout, WaveformConfig};

/// Split of one sample's power into its `m = n` and `m != n` parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IciPower {
    /// `(1/N) * sum |s_n|^2`
    pub signal: f64,
    /// `(1/N) * sum_{m != n} s_n conj(s_m) exp(j2pi(n-m)k*alpha/(N*rho))`.
    /// Real up to rounding; kept complex to expose the imaginary residue.
    pub interference: Complex64,
}

impl IciPower {
    pub fn total(&self) -> f64 {
        self.signal + self.interference.re
    }
}

/// Decomposes the power of sample `k` (unit-gain `1/sqrt(N)` scaling) into
/// signal and interference terms. The sum equals `(M'/N) * |X'_k|^2` where
/// `X'_k` is the generated sample.
pub fn ici_power_decompose(symbols: &[Complex64], cfg: &WaveformConfig, k: usize) -> Result<IciPower> {
    let n = cfg.n_subcarriers();
    if symbols.len() != n {
        return invalid(format!("{} symbols for {n} subcarriers", symbols.len()));
    }
    let len = cfg.samples_per_frame();
    if k >= len {
        return Err(Error::OutOfRange { index: k, len });
    }
    let layout = cfg.without_band_plan().layout()?;
    Ok(decompose_on(&layout, symbols, k))
}

/// As [`ici_power_decompose`] but on the configuration's own layout
/// (multi-band aware).
pub fn ici_power_decompose_layout(symbols: &[Complex64], cfg: &WaveformConfig, k: usize) -> Result<IciPower> {
    let layout = cfg.layout()?;
    if symbols.len() != layout.n_carriers() {
        return invalid("symbol count does not match layout");
    }
    if k >= layout.retained() {
        return Err(Error::OutOfRange {
            index: k,
            len: layout.retained(),
        });
    }
    Ok(decompose_on(&layout, symbols, k))
}

/// Frame average of [`ici_power_decompose`] over all retained samples.
/// With orthogonal spacing the cross terms cancel over the frame, so the
/// averaged interference vanishes even though single samples carry some.
pub fn ici_power_average(symbols: &[Complex64], cfg: &WaveformConfig) -> Result<IciPower> {
    let len = cfg.samples_per_frame();
    let mut acc = IciPower {
        signal: 0.0,
        interference: Complex64::new(0.0, 0.0),
    };
    for k in 0..len {
        let p = ici_power_decompose(symbols, cfg, k)?;
        acc.signal += p.signal;
        acc.interference += p.interference;
    }
    acc.signal /= len as f64;
    acc.interference /= len as f64;
    Ok(acc)
}

fn decompose_on(layout: &CarrierLayout, s: &[Complex64], k: usize) -> IciPower {
    let n = s.len() as f64;
    let g = layout.grid_len() as i64;
    let bins = layout.bins();
    let signal = s.iter().map(|x| x.norm_sqr()).sum::<f64>() / n;
    let mut interference = Complex64::new(0.0, 0.0);
    for (a, &sa) in s.iter().enumerate() {
        for (b, &sb) in s.iter().enumerate() {
            if a == b {
                continue;
            }
            let d = (bins[a] as i64 - bins[b] as i64).rem_euclid(g);
            let phase = (d as i128 * k as i128).rem_euclid(g as i128) as f64;
            interference += sa * sb.conj() * Complex64::from_polar(1.0, TAU * phase / g as f64);
        }
    }
    IciPower {
        signal,
        interference: interference / n,
    }
}

/// Normalised inner products of the retained carriers,
/// `C[m][n] = (1/(N*rho)) * sum_k exp(j2pi(f_n - f_m)k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationOperator {
    n: usize,
    entries: Vec<Complex64>,
}

impl CorrelationOperator {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.n + col]
    }

    pub fn apply(&self, s: &[Complex64]) -> Vec<Complex64> {
        self.entries
            .chunks_exact(self.n)
            .map(|row| row.iter().zip(s).map(|(c, x)| c * x).sum())
            .collect()
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.n, self.n, &self.entries)
    }

    pub fn hermitian_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.n {
            for c in 0..self.n {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    pub fn identity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.n {
            for c in 0..self.n {
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((self.get(r, c) - target).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.to_matrix()
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest off-diagonal magnitude over pairs selected by `pick`.
    pub fn max_offdiag_by(&self, mut pick: impl FnMut(usize, usize) -> bool) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.n {
            for c in 0..self.n {
                if r != c && pick(r, c) {
                    worst = worst.max(self.get(r, c).norm());
                }
            }
        }
        worst
    }
}

/// Closed-form (geometric series) correlation operator of `cfg`'s layout.
pub fn correlation_operator(cfg: &WaveformConfig) -> Result<CorrelationOperator> {
    Ok(correlation_of_layout(&cfg.layout()?))
}

pub fn correlation_of_layout(layout: &CarrierLayout) -> CorrelationOperator {
    let n = layout.n_carriers();
    let k = layout.retained() as i64;
    let g = layout.grid_len() as i64;
    let bins = layout.bins();
    let mut entries = Vec::with_capacity(n * n);
    for m in 0..n {
        for c in 0..n {
            let d = (bins[c] as i64 - bins[m] as i64).rem_euclid(g);
            if d == 0 {
                entries.push(Complex64::new(1.0, 0.0));
                continue;
            }
            let theta = TAU * d as f64 / g as f64;
            let full = ((d as i128 * k as i128).rem_euclid(g as i128)) as f64;
            let num = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, TAU * full / g as f64);
            let den = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, theta);
            entries.push(num / den / k as f64);
        }
    }
    CorrelationOperator { n, entries }
}
