//! Welch-averaged power spectral density, normalised to a 0 dB peak.

use std::f64::consts::TAU;
use std::io::Write;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{invalid, Result};
use crate::iq::IqFrame;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint {
    /// Frequency in cycles per sample, in `[-0.5, 0.5)`.
    pub freq_norm: f64,
    pub power_db: f64,
}

fn hann(len: usize) -> Vec<f64> {
    if len == 1 {
        return vec![1.0];
    }
    (0..len)
        .map(|i| 0.5 - 0.5 * (TAU * i as f64 / len as f64).cos())
        .collect()
}

/// Averages Hann-windowed periodograms of `nfft`-sample segments (50%
/// overlap) over every frame. Frames shorter than `nfft` are zero-padded.
pub fn psd_estimate(frames: &[IqFrame], nfft: usize) -> Result<Vec<SpectrumPoint>> {
    let sample_sets: Vec<&[Complex64]> = frames.iter().map(|f| f.samples.as_slice()).collect();
    psd_of_samples(&sample_sets, nfft)
}

pub fn psd_of_samples(frames: &[&[Complex64]], nfft: usize) -> Result<Vec<SpectrumPoint>> {
    if frames.is_empty() || frames.iter().all(|f| f.is_empty()) {
        return invalid("no samples to estimate a spectrum from");
    }
    if nfft < 2 {
        return invalid("nfft must be at least 2");
    }
    let fft = FftPlanner::new().plan_fft_forward(nfft);
    let hop = (nfft / 2).max(1);
    let mut acc = vec![0.0f64; nfft];
    let mut buf = vec![Complex64::new(0.0, 0.0); nfft];
    let mut segments = 0usize;

    for frame in frames.iter().filter(|f| !f.is_empty()) {
        let seg_len = frame.len().min(nfft);
        let window = hann(seg_len);
        let mut start = 0;
        loop {
            buf.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
            for (i, (b, w)) in buf.iter_mut().zip(&window).enumerate() {
                *b = frame[start + i] * *w;
            }
            fft.process(&mut buf);
            for (a, x) in acc.iter_mut().zip(&buf) {
                *a += x.norm_sqr();
            }
            segments += 1;
            if start + seg_len + hop > frame.len() {
                break;
            }
            start += hop;
        }
    }

    let peak = acc.iter().cloned().fold(0.0, f64::max);
    let floor = f64::MIN_POSITIVE;
    let half = nfft / 2;
    let points = (0..nfft)
        .map(|i| {
            // fftshift: start at the most negative frequency
            let bin = (i + nfft - half) % nfft;
            let signed = if bin >= nfft - half { bin as i64 - nfft as i64 } else { bin as i64 };
            let p = (acc[bin] / segments as f64).max(floor);
            SpectrumPoint {
                freq_norm: signed as f64 / nfft as f64,
                power_db: 10.0 * (p / (peak / segments as f64).max(floor)).log10(),
            }
        })
        .collect();
    Ok(points)
}

pub fn write_spectrum_csv<W: Write>(mut w: W, points: &[SpectrumPoint]) -> Result<()> {
    writeln!(w, "freq_norm,power_db")?;
    for p in points {
        writeln!(w, "{:.8},{:.6}", p.freq_norm, p.power_db)?;
    }
    Ok(())
}

/// Width (in cycles/sample) between the outermost points within `drop_db`
/// of the peak.
pub fn occupied_bandwidth(points: &[SpectrumPoint], drop_db: f64) -> f64 {
    let above: Vec<f64> = points
        .iter()
        .filter(|p| p.power_db >= -drop_db)
        .map(|p| p.freq_norm)
        .collect();
    match (
        above.iter().cloned().fold(f64::INFINITY, f64::min),
        above.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    ) {
        (lo, hi) if lo.is_finite() && hi.is_finite() => hi - lo,
        _ => 0.0,
    }
}

pub fn peak_frequency(points: &[SpectrumPoint]) -> f64 {
    points
        .iter()
        .max_by(|a, b| a.power_db.total_cmp(&b.power_db))
        .map(|p| p.freq_norm)
        .unwrap_or(0.0)
}
