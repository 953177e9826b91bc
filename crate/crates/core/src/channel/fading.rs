use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rustfft::FftPlanner;

use super::ChannelProfile;
use crate::error::{invalid, Result};
use crate::iq::IqFrame;
use crate::rng::{rng_from, SimRng};

/// Sinusoids per Jakes process.
pub const JAKES_SINUSOIDS: usize = 32;

/// Unit-power sum-of-sinusoids fading process whose autocorrelation
/// approaches `J0(2 pi f_d tau)` over random draws.
#[derive(Debug, Clone)]
pub struct JakesProcess {
    omegas: Vec<f64>,
    phases: Vec<f64>,
}

impl JakesProcess {
    pub fn new(max_doppler_hz: f64, rng: &mut SimRng) -> Self {
        let mut omegas = Vec::with_capacity(JAKES_SINUSOIDS);
        let mut phases = Vec::with_capacity(JAKES_SINUSOIDS);
        for _ in 0..JAKES_SINUSOIDS {
            let arrival: f64 = rng.random::<f64>() * TAU;
            omegas.push(TAU * max_doppler_hz * arrival.cos());
            phases.push(rng.random::<f64>() * TAU);
        }
        Self { omegas, phases }
    }

    pub fn gain_at(&self, t: f64) -> Complex64 {
        let sum: Complex64 = self
            .omegas
            .iter()
            .zip(&self.phases)
            .map(|(w, p)| Complex64::from_polar(1.0, w * t + p))
            .sum();
        sum / (self.omegas.len() as f64).sqrt()
    }
}

/// Realised per-sample gains of every tap.
#[derive(Debug, Clone, PartialEq)]
pub struct TapTrace {
    pub delays_samples: Vec<usize>,
    /// `gains[tap][sample]`
    pub gains: Vec<Vec<Complex64>>,
}

impl TapTrace {
    pub fn mean_gains(&self) -> Vec<Complex64> {
        self.gains
            .iter()
            .map(|g| g.iter().sum::<Complex64>() / g.len().max(1) as f64)
            .collect()
    }

    /// Response of the frame-averaged channel at `freq` cycles/sample.
    pub fn frequency_response(&self, freq: f64) -> Complex64 {
        self.mean_gains()
            .iter()
            .zip(&self.delays_samples)
            .map(|(h, &d)| h * Complex64::from_polar(1.0, -TAU * freq * d as f64))
            .sum()
    }
}

/// Tapped-delay-line channel: tap 0 Rician with a fixed-phase line-of-sight
/// part, later taps Rayleigh, every scattered part Jakes-faded. Tap powers
/// are normalised to unit total.
///
/// The output keeps the convolution tail, so it is longer than the input by
/// the largest path delay. [`equalize_with_taps`] trims it again.
pub fn rician_multipath(frame: &IqFrame, profile: &ChannelProfile, rng_seed: u64) -> Result<(IqFrame, TapTrace)> {
    profile.validate()?;
    let len = frame.len();
    let delays = profile.delay_samples();
    if let Some(&d) = delays.iter().find(|&&d| d >= len) {
        return invalid(format!("path delay of {d} samples exceeds the {len}-sample frame"));
    }
    let powers = profile.normalized_powers();
    let mut rng = rng_from(rng_seed);
    let fs = profile.sample_rate_hz;

    let (los_fraction, scatter_fraction) = if profile.k_factor.is_infinite() {
        (1.0, 0.0)
    } else {
        let k = profile.k_factor;
        (k / (k + 1.0), 1.0 / (k + 1.0))
    };

    let span = delays.iter().copied().max().unwrap_or(0);
    let out_len = len + span;
    let mut gains = Vec::with_capacity(delays.len());
    for (tap, &p) in powers.iter().enumerate() {
        let process = JakesProcess::new(profile.max_doppler_hz, &mut rng);
        let (los, scatter) = if tap == 0 {
            ((p * los_fraction).sqrt(), (p * scatter_fraction).sqrt())
        } else {
            (0.0, p.sqrt())
        };
        gains.push(
            (0..out_len)
                .map(|k| {
                    let mut h = Complex64::new(los, 0.0);
                    if scatter > 0.0 {
                        h += process.gain_at(k as f64 / fs) * scatter;
                    }
                    h
                })
                .collect::<Vec<_>>(),
        );
    }

    let mut out = vec![Complex64::new(0.0, 0.0); out_len];
    for (g, &d) in gains.iter().zip(&delays) {
        for k in d..len + d {
            out[k] += g[k] * frame.samples[k - d];
        }
    }
    let trace = TapTrace {
        delays_samples: delays,
        gains,
    };
    Ok((frame.with_samples(out), trace))
}

/// Genie-CSI equaliser: divides the spectrum by the frame-averaged channel
/// response on a zero-padded grid, then drops the convolution tail. Near-null
/// bins are clamped so the division stays bounded.
pub fn equalize_with_taps(frame: &IqFrame, trace: &TapTrace) -> IqFrame {
    let span = trace.delays_samples.iter().copied().max().unwrap_or(0);
    let full = frame.len();
    let len = full.saturating_sub(span);
    let grid = full.next_power_of_two().max(1);
    let mut planner = FftPlanner::new();
    let mut buf = vec![Complex64::new(0.0, 0.0); grid];
    buf[..full].copy_from_slice(&frame.samples);
    planner.plan_fft_forward(grid).process(&mut buf);
    let taps = trace.mean_gains();
    for (i, x) in buf.iter_mut().enumerate() {
        let f = i as f64 / grid as f64;
        let h: Complex64 = taps
            .iter()
            .zip(&trace.delays_samples)
            .map(|(h, &d)| h * Complex64::from_polar(1.0, -TAU * f * d as f64))
            .sum();
        let h = if h.norm() < 1e-3 { h / h.norm().max(1e-300) * 1e-3 } else { h };
        *x /= h;
    }
    planner.plan_fft_inverse(grid).process(&mut buf);
    let scale = 1.0 / grid as f64;
    frame.with_samples(buf[..len].iter().map(|x| x * scale).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iq::FrameMeta;

    fn frame(samples: Vec<Complex64>) -> IqFrame {
        IqFrame::new(
            samples,
            FrameMeta {
                alpha_effective: 1.0,
                n_subcarriers: 1,
                oversampling: 1,
                es_n0_db: None,
                class_label: None,
                rng_seed: 0,
            },
        )
    }

    #[test]
    fn pure_los_is_transparent() {
        let f = frame((0..32).map(|k| Complex64::new(k as f64, -1.0)).collect());
        let (out, trace) = rician_multipath(&f, &ChannelProfile::pass_through(200e3), 9).unwrap();
        assert_eq!(out.samples, f.samples);
        assert_eq!(trace.delays_samples, vec![0]);
    }

    #[test]
    fn delay_longer_than_frame_is_rejected() {
        let f = frame(vec![Complex64::new(1.0, 0.0); 3]);
        assert!(rician_multipath(&f, &ChannelProfile::table1(), 0).is_err());
    }

    #[test]
    fn fading_is_seeded() {
        let f = frame(vec![Complex64::new(1.0, 0.0); 64]);
        let p = ChannelProfile::table1();
        let a = rician_multipath(&f, &p, 5).unwrap();
        let b = rician_multipath(&f, &p, 5).unwrap();
        let c = rician_multipath(&f, &p, 6).unwrap();
        assert_eq!(a.0, b.0);
        assert_ne!(a.0.samples, c.0.samples);
    }

    #[test]
    fn equalizer_undoes_static_channel() {
        let mut p = ChannelProfile::table1();
        p.max_doppler_hz = 0.0;
        p.k_factor = 1e6;
        let x: Vec<Complex64> = (0..256)
            .map(|k| Complex64::from_polar(1.0, 0.37 * k as f64 + 0.001 * (k * k) as f64))
            .collect();
        let f = frame(x.clone());
        let (y, trace) = rician_multipath(&f, &p, 11).unwrap();
        let eq = equalize_with_taps(&y, &trace);
        assert_eq!(y.len(), 259);
        assert_eq!(eq.len(), 256);
        let err: f64 = eq.samples.iter().zip(&x).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>() / 256.0;
        assert!(err < 1e-20, "{err}");
    }
}
