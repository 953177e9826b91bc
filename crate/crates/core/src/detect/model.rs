use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::Result;
use crate::waveform::{CarrierLayout, WaveformConfig};

/// Real-valued QR factors of a set of carriers.
///
/// Unknowns are interleaved `[Re s_0, Im s_0, Re s_1, ...]`; observations
/// are stacked `[Re y; Im y]`. `R` is upper triangular with a nonnegative
/// diagonal and `Q^T` is kept row-major for fast projection.
#[derive(Debug, Clone)]
pub struct TreeModel {
    dim: usize,
    samples: usize,
    q_t: Vec<f64>,
    r: Vec<f64>,
}

impl TreeModel {
    /// Factorises the carriers `columns` (each of `samples` length).
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Self {
        let n = columns.len();
        let samples = columns.first().map_or(0, Vec::len);
        let mut h = DMatrix::<f64>::zeros(2 * samples, 2 * n);
        for (c, col) in columns.iter().enumerate() {
            for (k, phi) in col.iter().enumerate() {
                h[(k, 2 * c)] = phi.re;
                h[(samples + k, 2 * c)] = phi.im;
                h[(k, 2 * c + 1)] = -phi.im;
                h[(samples + k, 2 * c + 1)] = phi.re;
            }
        }
        let qr = h.qr();
        let mut q = qr.q();
        let mut r = qr.r();
        for i in 0..2 * n {
            if r[(i, i)] < 0.0 {
                r.row_mut(i).neg_mut();
                q.column_mut(i).neg_mut();
            }
        }
        let dim = 2 * n;
        let mut q_t = Vec::with_capacity(dim * 2 * samples);
        for i in 0..dim {
            q_t.extend(q.column(i).iter());
        }
        let mut r_rows = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            r_rows.extend(r.row(i).iter());
        }
        Self {
            dim,
            samples,
            q_t,
            r: r_rows,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major upper-triangular factor.
    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn r_at(&self, row: usize, col: usize) -> f64 {
        self.r[row * self.dim + col]
    }

    /// `Q^T [Re y; Im y]`.
    pub fn project(&self, y: &[Complex64]) -> Vec<f64> {
        debug_assert_eq!(y.len(), self.samples);
        let k = self.samples;
        self.q_t
            .chunks_exact(2 * k)
            .map(|row| {
                let (re, im) = row.split_at(k);
                re.iter()
                    .zip(im)
                    .zip(y)
                    .map(|((a, b), y)| a * y.re + b * y.im)
                    .sum()
            })
            .collect()
    }

    /// `R x` for a real vector `x`.
    pub fn apply_r(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| (i..self.dim).map(|j| self.r_at(i, j) * x[j]).sum())
            .collect()
    }

    /// Back-substitution `R^-1 z` (zero-forcing estimate).
    pub fn solve(&self, z: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.dim];
        for i in (0..self.dim).rev() {
            let acc: f64 = (i + 1..self.dim).map(|j| self.r_at(i, j) * x[j]).sum();
            let d = self.r_at(i, i);
            x[i] = if d > 0.0 { (z[i] - acc) / d } else { 0.0 };
        }
        x
    }
}

/// Carrier matrix `Phi` of a waveform plus its real QR factors.
#[derive(Debug, Clone)]
pub struct ObservationModel {
    layout: CarrierLayout,
    alpha: f64,
    columns: Vec<Vec<Complex64>>,
    tree: TreeModel,
}

impl ObservationModel {
    pub fn new(cfg: &WaveformConfig) -> Result<Self> {
        let layout = cfg.layout()?;
        let columns: Vec<Vec<Complex64>> =
            (0..layout.n_carriers()).map(|n| layout.carrier_column(n)).collect();
        let tree = TreeModel::from_columns(&columns);
        Ok(Self {
            layout,
            alpha: cfg.alpha_effective(),
            columns,
            tree,
        })
    }

    pub fn n_subcarriers(&self) -> usize {
        self.columns.len()
    }

    pub fn samples(&self) -> usize {
        self.layout.retained()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn columns(&self) -> &[Vec<Complex64>] {
        &self.columns
    }

    pub fn tree(&self) -> &TreeModel {
        &self.tree
    }

    /// `Phi^H Phi` (equals `alpha * C`).
    pub fn gram(&self) -> Vec<Vec<Complex64>> {
        self.columns
            .iter()
            .map(|a| {
                self.columns
                    .iter()
                    .map(|b| a.iter().zip(b).map(|(x, y)| x.conj() * y).sum())
                    .collect()
            })
            .collect()
    }

    pub fn synthesize(&self, s: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.samples()];
        for (col, &x) in self.columns.iter().zip(s) {
            for (o, c) in out.iter_mut().zip(col) {
                *o += c * x;
            }
        }
        out
    }
}

#[allow(dead_code)]
pub(crate) fn to_real(s: &[Complex64]) -> Vec<f64> {
    s.iter().flat_map(|x| [x.re, x.im]).collect()
}

pub(crate) fn from_real(x: &[f64]) -> Vec<Complex64> {
    x.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect()
}
