//! Channel and hardware impairments: AWGN, Rician multipath with Jakes
//! Doppler, and carrier frequency offset.

mod fading;

use std::f64::consts::TAU;
use std::path::Path;

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::iq::IqFrame;
use crate::rng::rng_from;

pub use fading::{equalize_with_taps, rician_multipath, JakesProcess, TapTrace, JAKES_SINUSOIDS};

/// Multipath, fading and oscillator parameters, in SI units.
///
/// Serialised with descriptive field names and units (kHz, MHz).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileRecord", into = "ProfileRecord")]
pub struct ChannelProfile {
    pub path_delays_s: Vec<f64>,
    pub path_powers_db: Vec<f64>,
    pub k_factor: f64,
    pub max_doppler_hz: f64,
    pub cfo_ppm: f64,
    pub rf_center_hz: f64,
    pub sample_rate_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ProfileRecord {
    sampling_frequency_khz: f64,
    rf_center_frequency_mhz: f64,
    path_delay_s: Vec<f64>,
    path_relative_power_db: Vec<f64>,
    maximum_doppler_frequency_hz: f64,
    k_factor: f64,
    frequency_offset_ppm: f64,
}

impl TryFrom<ProfileRecord> for ChannelProfile {
    type Error = Error;

    fn try_from(r: ProfileRecord) -> Result<Self> {
        let p = ChannelProfile {
            path_delays_s: r.path_delay_s,
            path_powers_db: r.path_relative_power_db,
            k_factor: r.k_factor,
            max_doppler_hz: r.maximum_doppler_frequency_hz,
            cfo_ppm: r.frequency_offset_ppm,
            rf_center_hz: r.rf_center_frequency_mhz * 1e6,
            sample_rate_hz: r.sampling_frequency_khz * 1e3,
        };
        p.validate()?;
        Ok(p)
    }
}

impl From<ChannelProfile> for ProfileRecord {
    fn from(p: ChannelProfile) -> Self {
        ProfileRecord {
            sampling_frequency_khz: p.sample_rate_hz / 1e3,
            rf_center_frequency_mhz: p.rf_center_hz / 1e6,
            path_delay_s: p.path_delays_s,
            path_relative_power_db: p.path_powers_db,
            maximum_doppler_frequency_hz: p.max_doppler_hz,
            k_factor: p.k_factor,
            frequency_offset_ppm: p.cfo_ppm,
        }
    }
}

/// The shipped reference profile (`profiles/table1.json`).
pub const TABLE1_PROFILE_JSON: &str = include_str!("../../profiles/table1.json");

impl ChannelProfile {
    /// Three-tap Rician profile at 200 kHz / 900 MHz.
    pub fn table1() -> Self {
        Self {
            path_delays_s: vec![0.0, 9e-6, 1.7e-5],
            path_powers_db: vec![0.0, -2.0, -10.0],
            k_factor: 4.0,
            max_doppler_hz: 4.0,
            cfo_ppm: 2.0,
            rf_center_hz: 900e6,
            sample_rate_hz: 200e3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.path_delays_s.is_empty() || self.path_delays_s.len() != self.path_powers_db.len() {
            return invalid("path delays and powers must be non-empty and the same length");
        }
        if self.path_delays_s[0] != 0.0 {
            return invalid("first path delay must be 0");
        }
        if self.path_delays_s.windows(2).any(|w| w[1] < w[0]) {
            return invalid("path delays must be nondecreasing");
        }
        if self.path_powers_db[0] != 0.0 {
            return invalid("first path power is the 0 dB reference");
        }
        if !(self.k_factor >= 0.0) || !(self.max_doppler_hz >= 0.0) {
            return invalid("K-factor and Doppler must be nonnegative");
        }
        if !(self.sample_rate_hz > 0.0 && self.rf_center_hz > 0.0) {
            return invalid("sample rate and RF centre must be positive");
        }
        Ok(())
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    /// Path delays rounded half-up to whole samples.
    pub fn delay_samples(&self) -> Vec<usize> {
        self.path_delays_s
            .iter()
            .map(|d| (d * self.sample_rate_hz + 0.5 + 1e-9).floor() as usize)
            .collect()
    }

    /// Linear tap powers normalised to unit total.
    pub fn normalized_powers(&self) -> Vec<f64> {
        let lin: Vec<f64> = self.path_powers_db.iter().map(|p| 10f64.powf(p / 10.0)).collect();
        let total: f64 = lin.iter().sum();
        lin.iter().map(|p| p / total).collect()
    }

    pub fn frequency_offset_hz(&self) -> f64 {
        self.cfo_ppm * 1e-6 * self.rf_center_hz
    }

    /// Single static line-of-sight path: no fading, no offset.
    pub fn pass_through(sample_rate_hz: f64) -> Self {
        Self {
            path_delays_s: vec![0.0],
            path_powers_db: vec![0.0],
            k_factor: f64::INFINITY,
            max_doppler_hz: 0.0,
            cfo_ppm: 0.0,
            rf_center_hz: 1.0,
            sample_rate_hz,
        }
    }
}

/// Symbol-energy to noise-density ratio. `+inf` means no noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub es_n0_db: f64,
}

impl NoiseSpec {
    pub fn new(es_n0_db: f64) -> Self {
        Self { es_n0_db }
    }

    pub fn noiseless() -> Self {
        Self {
            es_n0_db: f64::INFINITY,
        }
    }
}

/// Energy per transmitted constellation symbol, `frame energy / N`.
pub fn symbol_energy(frame: &IqFrame) -> f64 {
    frame.energy() / frame.meta.n_subcarriers.max(1) as f64
}

/// Per-sample complex noise variance for `spec` given the frame's measured
/// symbol energy.
pub fn noise_variance(frame: &IqFrame, spec: NoiseSpec) -> f64 {
    if spec.es_n0_db == f64::INFINITY {
        return 0.0;
    }
    symbol_energy(frame) / 10f64.powf(spec.es_n0_db / 10.0)
}

/// Adds circular complex Gaussian noise at the requested Es/N0, with Es
/// measured on `frame` itself.
pub fn awgn(frame: &IqFrame, spec: NoiseSpec, rng_seed: u64) -> Result<IqFrame> {
    if spec.es_n0_db.is_nan() || spec.es_n0_db == f64::NEG_INFINITY {
        return invalid(format!("Es/N0 {} dB", spec.es_n0_db));
    }
    let mut out = add_noise(frame, noise_variance(frame, spec), rng_seed)?;
    out.meta.es_n0_db = Some(spec.es_n0_db);
    Ok(out)
}

/// Adds circular complex Gaussian noise of per-sample variance `variance`.
/// Used after fading, where Es is referenced to the transmitted frame.
pub fn add_noise(frame: &IqFrame, variance: f64, rng_seed: u64) -> Result<IqFrame> {
    if frame.is_empty() {
        return invalid("cannot add noise to an empty frame");
    }
    if !(variance >= 0.0) || variance.is_infinite() {
        return invalid(format!("noise variance {variance}"));
    }
    let mut out = frame.clone();
    let var = variance;
    if var == 0.0 {
        return Ok(out);
    }
    let sigma = (var / 2.0).sqrt();
    let mut rng = rng_from(rng_seed);
    for x in out.samples.iter_mut() {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        *x += Complex64::new(re, im) * sigma;
    }
    Ok(out)
}

/// Rotates sample `k` by `exp(j2pi f_off k / fs)`.
pub fn apply_cfo(frame: &IqFrame, profile: &ChannelProfile) -> IqFrame {
    let f = profile.frequency_offset_hz() / profile.sample_rate_hz;
    if f == 0.0 {
        return frame.clone();
    }
    let samples = frame
        .samples
        .iter()
        .enumerate()
        .map(|(k, x)| x * Complex64::from_polar(1.0, TAU * (f * k as f64).fract()))
        .collect();
    frame.with_samples(samples)
}
