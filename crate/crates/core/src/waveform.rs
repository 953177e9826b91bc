//! Waveform configuration and OFDM/SEFDM symbol generation.
//!
//! A symbol is generated by placing `N` constellation points on the bins of
//! an inverse DFT of length `M' = round(N*rho/alpha)`, keeping the first
//! `N*rho` output samples and discarding the rest. Keeping fewer samples
//! than the transform length is what compresses the subcarrier spacing to
//! `alpha` times the orthogonal spacing. `alpha = 1` is plain oversampled
//! OFDM.
//!
//! Multi-band layouts place `n_bands` groups of `band_size` compressed
//! subcarriers with `guard` orthogonal spacings between the last carrier of
//! one band and the first of the next. Fractional positions are realised on
//! the smallest transform grid that makes every position an integer bin.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::iq::{FrameMeta, IqFrame};
use crate::qpsk::SymbolVector;

/// Oversampling factor used throughout the reference setup.
pub const DEFAULT_OVERSAMPLING: usize = 8;

/// Largest transform grid generated through the FFT path. Larger grids fall
/// back to direct per-carrier summation from a precomputed table.
pub const FFT_GRID_LIMIT: usize = 1 << 16;

/// Groups of compressed subcarriers separated by orthogonal guard spacings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BandPlan {
    pub n_bands: usize,
    pub band_size: usize,
    pub guard_subcarriers: usize,
}

impl BandPlan {
    pub fn new(n_bands: usize, band_size: usize, guard_subcarriers: usize) -> Result<Self> {
        let plan = Self {
            n_bands,
            band_size,
            guard_subcarriers,
        };
        plan.validate(None)?;
        Ok(plan)
    }

    /// Splits `n_subcarriers` into bands of `band_size`.
    pub fn uniform(n_subcarriers: usize, band_size: usize, guard_subcarriers: usize) -> Result<Self> {
        if band_size == 0 || n_subcarriers % band_size != 0 {
            return Err(Error::BandPlan(format!(
                "{n_subcarriers} subcarriers do not split into bands of {band_size}"
            )));
        }
        Self::new(n_subcarriers / band_size, band_size, guard_subcarriers)
    }

    pub fn total_subcarriers(&self) -> usize {
        self.n_bands * self.band_size
    }

    pub fn band_range(&self, band: usize) -> std::ops::Range<usize> {
        band * self.band_size..(band + 1) * self.band_size
    }

    fn validate(&self, n_subcarriers: Option<usize>) -> Result<()> {
        if self.n_bands == 0 || self.band_size == 0 {
            return Err(Error::BandPlan("bands must be non-empty".into()));
        }
        if self.n_bands > 1 && self.guard_subcarriers == 0 {
            return Err(Error::BandPlan(
                "multiple bands need at least one guard spacing".into(),
            ));
        }
        if let Some(n) = n_subcarriers {
            if self.total_subcarriers() != n {
                return Err(Error::BandPlan(format!(
                    "{} bands x {} != {n} subcarriers",
                    self.n_bands, self.band_size
                )));
            }
        }
        Ok(())
    }
}

/// Serialized form of [`WaveformConfig`]; the transform length is derived.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveformSpec {
    pub n_subcarriers: usize,
    pub alpha: f64,
    #[serde(default = "default_oversampling")]
    pub oversampling: usize,
    #[serde(default)]
    pub band_plan: Option<BandPlan>,
}

fn default_oversampling() -> usize {
    DEFAULT_OVERSAMPLING
}

/// Identity of a signal class: subcarrier count, compression and layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WaveformSpec", into = "WaveformSpec")]
pub struct WaveformConfig {
    n_subcarriers: usize,
    alpha_target: f64,
    oversampling: usize,
    ifft_len: usize,
    band_plan: Option<BandPlan>,
}

impl WaveformConfig {
    pub fn new(n_subcarriers: usize, alpha_target: f64, oversampling: usize) -> Result<Self> {
        if n_subcarriers == 0 {
            return invalid("at least one subcarrier is required");
        }
        if oversampling == 0 {
            return invalid("oversampling must be positive");
        }
        if !(alpha_target > 0.0 && alpha_target <= 1.0) {
            return invalid(format!("alpha {alpha_target} outside (0, 1]"));
        }
        let retained = n_subcarriers * oversampling;
        let ifft_len = (retained as f64 / alpha_target).round() as usize;
        Ok(Self {
            n_subcarriers,
            alpha_target,
            oversampling,
            ifft_len: ifft_len.max(retained),
            band_plan: None,
        })
    }

    pub fn with_band_plan(mut self, plan: BandPlan) -> Result<Self> {
        plan.validate(Some(self.n_subcarriers))?;
        self.band_plan = Some(plan);
        // reject layouts that overflow the sampled bandwidth up front
        self.layout()?;
        Ok(self)
    }

    pub fn without_band_plan(&self) -> Self {
        Self {
            band_plan: None,
            ..self.clone()
        }
    }

    /// Same subcarrier count, oversampling and band plan at another `alpha`.
    pub fn with_alpha(&self, alpha_target: f64) -> Result<Self> {
        let cfg = Self::new(self.n_subcarriers, alpha_target, self.oversampling)?;
        match self.band_plan {
            Some(plan) => cfg.with_band_plan(plan),
            None => Ok(cfg),
        }
    }

    pub fn n_subcarriers(&self) -> usize {
        self.n_subcarriers
    }

    pub fn alpha_target(&self) -> f64 {
        self.alpha_target
    }

    pub fn oversampling(&self) -> usize {
        self.oversampling
    }

    pub fn ifft_len(&self) -> usize {
        self.ifft_len
    }

    pub fn band_plan(&self) -> Option<&BandPlan> {
        self.band_plan.as_ref()
    }

    /// Samples kept per symbol, `N * rho`, independent of `alpha`.
    pub fn samples_per_frame(&self) -> usize {
        self.n_subcarriers * self.oversampling
    }

    /// Realised compression `N*rho / M'`.
    pub fn alpha_effective(&self) -> f64 {
        self.samples_per_frame() as f64 / self.ifft_len as f64
    }

    pub fn is_orthogonal(&self) -> bool {
        self.ifft_len == self.samples_per_frame()
    }

    /// Carrier layout honouring the band plan, if any.
    pub fn layout(&self) -> Result<CarrierLayout> {
        match self.band_plan {
            Some(plan) => CarrierLayout::multiband(self, &plan),
            None => Ok(CarrierLayout::contiguous(self)),
        }
    }

    pub(crate) fn frame_meta(&self, rng_seed: u64) -> FrameMeta {
        FrameMeta {
            alpha_effective: self.alpha_effective(),
            n_subcarriers: self.n_subcarriers,
            oversampling: self.oversampling,
            es_n0_db: None,
            class_label: None,
            rng_seed,
        }
    }
}

impl TryFrom<WaveformSpec> for WaveformConfig {
    type Error = Error;

    fn try_from(spec: WaveformSpec) -> Result<Self> {
        let cfg = Self::new(spec.n_subcarriers, spec.alpha, spec.oversampling)?;
        match spec.band_plan {
            Some(plan) => cfg.with_band_plan(plan),
            None => Ok(cfg),
        }
    }
}

impl From<WaveformConfig> for WaveformSpec {
    fn from(cfg: WaveformConfig) -> Self {
        Self {
            n_subcarriers: cfg.n_subcarriers,
            alpha: cfg.alpha_target,
            oversampling: cfg.oversampling,
            band_plan: cfg.band_plan,
        }
    }
}

impl fmt::Display for WaveformConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "N={} alpha={:.4} (M'={}) rho={}",
            self.n_subcarriers,
            self.alpha_effective(),
            self.ifft_len,
            self.oversampling
        )?;
        if let Some(p) = &self.band_plan {
            write!(f, " bands={}x{} guard={}", p.n_bands, p.band_size, p.guard_subcarriers)?;
        }
        Ok(())
    }
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Integer-bin placement of every subcarrier on a common transform grid.
///
/// Carrier `n` at sample `k` is `scale * exp(j*2*pi*bins[n]*k / grid_len)`
/// for `k < retained`.
#[derive(Debug, Clone, PartialEq)]
pub struct CarrierLayout {
    retained: usize,
    grid_len: usize,
    bins: Vec<usize>,
    scale: f64,
}

impl CarrierLayout {
    fn contiguous(cfg: &WaveformConfig) -> Self {
        Self {
            retained: cfg.samples_per_frame(),
            grid_len: cfg.ifft_len,
            bins: (0..cfg.n_subcarriers).collect(),
            scale: 1.0 / (cfg.ifft_len as f64).sqrt(),
        }
    }

    fn multiband(cfg: &WaveformConfig, plan: &BandPlan) -> Result<Self> {
        let retained = cfg.samples_per_frame();
        let m = cfg.ifft_len;
        let guard = plan.guard_subcarriers;
        let grid_len = if guard == 0 {
            m
        } else {
            lcm(m, retained / gcd(guard, retained))
        };
        let step = grid_len / m;
        let stride = (plan.band_size - 1) * step + guard * grid_len / retained;
        let bins: Vec<usize> = (0..plan.n_bands)
            .flat_map(|b| (0..plan.band_size).map(move |n| b * stride + n * step))
            .collect();
        let top = *bins.last().expect("band plan is non-empty");
        if top >= grid_len {
            return Err(Error::BandPlan(format!(
                "layout spans {:.2} orthogonal spacings but only {retained} fit in a frame",
                top as f64 * retained as f64 / grid_len as f64
            )));
        }
        Ok(Self {
            retained,
            grid_len,
            bins,
            scale: 1.0 / (m as f64).sqrt(),
        })
    }

    pub fn n_carriers(&self) -> usize {
        self.bins.len()
    }

    pub fn retained(&self) -> usize {
        self.retained
    }

    pub fn grid_len(&self) -> usize {
        self.grid_len
    }

    pub fn bins(&self) -> &[usize] {
        &self.bins
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Carrier positions in units of the orthogonal spacing `1/T`.
    pub fn positions(&self) -> Vec<f64> {
        self.bins
            .iter()
            .map(|&q| q as f64 * self.retained as f64 / self.grid_len as f64)
            .collect()
    }

    /// Sample `k` of carrier `n`, with the phase reduced exactly mod the grid.
    pub fn carrier(&self, n: usize, k: usize) -> Complex64 {
        let phase = (self.bins[n] as u64 * k as u64) % self.grid_len as u64;
        Complex64::from_polar(self.scale, TAU * phase as f64 / self.grid_len as f64)
    }

    /// Retained samples of carrier `n`.
    pub fn carrier_column(&self, n: usize) -> Vec<Complex64> {
        (0..self.retained).map(|k| self.carrier(n, k)).collect()
    }
}

#[derive(Clone)]
enum Engine {
    Grid {
        inverse: Arc<dyn Fft<f64>>,
        forward: Arc<dyn Fft<f64>>,
    },
    Table(Arc<Vec<Complex64>>),
}

/// Reusable generator / correlator for one carrier layout.
///
/// `modulate` computes `Phi * s` and `correlate` computes `Phi^H * y`, where
/// column `n` of `Phi` is the retained carrier `n`.
#[derive(Clone)]
pub struct Modulator {
    layout: CarrierLayout,
    engine: Engine,
}

impl fmt::Debug for Modulator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let engine = match self.engine {
            Engine::Grid { .. } => "grid-fft",
            Engine::Table(_) => "table",
        };
        f.debug_struct("Modulator")
            .field("layout", &self.layout)
            .field("engine", &engine)
            .finish()
    }
}

impl Modulator {
    pub fn new(layout: CarrierLayout) -> Self {
        let engine = if layout.grid_len <= FFT_GRID_LIMIT {
            let mut planner = FftPlanner::new();
            Engine::Grid {
                inverse: planner.plan_fft_inverse(layout.grid_len),
                forward: planner.plan_fft_forward(layout.grid_len),
            }
        } else {
            let mut table = Vec::with_capacity(layout.retained * layout.n_carriers());
            for n in 0..layout.n_carriers() {
                table.extend((0..layout.retained).map(|k| layout.carrier(n, k)));
            }
            Engine::Table(Arc::new(table))
        };
        Self { layout, engine }
    }

    pub fn for_config(cfg: &WaveformConfig) -> Result<Self> {
        Ok(Self::new(cfg.layout()?))
    }

    pub fn layout(&self) -> &CarrierLayout {
        &self.layout
    }

    pub fn modulate(&self, symbols: &[Complex64]) -> Result<Vec<Complex64>> {
        let l = &self.layout;
        if symbols.len() != l.n_carriers() {
            return invalid(format!(
                "{} symbols for {} subcarriers",
                symbols.len(),
                l.n_carriers()
            ));
        }
        match &self.engine {
            Engine::Grid { inverse, .. } => {
                let mut buf = vec![Complex64::new(0.0, 0.0); l.grid_len];
                for (&q, &s) in l.bins.iter().zip(symbols) {
                    buf[q] = s;
                }
                inverse.process(&mut buf);
                buf.truncate(l.retained);
                buf.iter_mut().for_each(|x| *x *= l.scale);
                Ok(buf)
            }
            Engine::Table(table) => {
                let mut out = vec![Complex64::new(0.0, 0.0); l.retained];
                for (col, &s) in table.chunks_exact(l.retained).zip(symbols) {
                    for (o, &c) in out.iter_mut().zip(col) {
                        *o += c * s;
                    }
                }
                Ok(out)
            }
        }
    }

    pub fn correlate(&self, samples: &[Complex64]) -> Result<Vec<Complex64>> {
        let l = &self.layout;
        if samples.len() != l.retained {
            return invalid(format!(
                "{} samples, expected {}",
                samples.len(),
                l.retained
            ));
        }
        match &self.engine {
            Engine::Grid { forward, .. } => {
                let mut buf = vec![Complex64::new(0.0, 0.0); l.grid_len];
                buf[..l.retained].copy_from_slice(samples);
                forward.process(&mut buf);
                Ok(l.bins.iter().map(|&q| buf[q] * l.scale).collect())
            }
            Engine::Table(table) => Ok(table
                .chunks_exact(l.retained)
                .map(|col| col.iter().zip(samples).map(|(c, y)| c.conj() * y).sum())
                .collect()),
        }
    }
}

/// Contiguous-layout SEFDM symbol (the band plan, if any, is ignored).
pub fn sefdm_modulate(symbols: &SymbolVector, cfg: &WaveformConfig) -> Result<IqFrame> {
    if symbols.len() != cfg.n_subcarriers() {
        return invalid(format!(
            "{} symbols for {} subcarriers",
            symbols.len(),
            cfg.n_subcarriers()
        ));
    }
    let m = Modulator::new(CarrierLayout::contiguous(cfg));
    Ok(IqFrame::new(m.modulate(symbols)?, cfg.frame_meta(0)))
}

/// SEFDM symbol on the configuration's multi-band layout.
pub fn multiband_modulate(symbols: &SymbolVector, cfg: &WaveformConfig) -> Result<IqFrame> {
    if cfg.band_plan().is_none() {
        return Err(Error::BandPlan("configuration has no band plan".into()));
    }
    let m = Modulator::for_config(cfg)?;
    Ok(IqFrame::new(m.modulate(symbols)?, cfg.frame_meta(0)))
}

/// Orthogonal reference: size `N*rho` inverse DFT of the zero-padded
/// spectrum with `1/sqrt(N*rho)` scaling.
pub fn ofdm_modulate(symbols: &[Complex64], oversampling: usize) -> Vec<Complex64> {
    let len = symbols.len() * oversampling;
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    buf[..symbols.len()].copy_from_slice(symbols);
    FftPlanner::new().plan_fft_inverse(len).process(&mut buf);
    let scale = 1.0 / (len as f64).sqrt();
    buf.iter_mut().for_each(|x| *x *= scale);
    buf
}
