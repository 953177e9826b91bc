//! Independent reference computations shared by the integration tests.
//! Nothing here calls into the crate's signal path.

#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use num_bigint::BigUint;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_bits(rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.random_range(0..2u8)).collect()
}

/// QPSK with the first bit of each pair on the real axis.
pub fn qpsk(bits: &[u8]) -> Vec<Complex64> {
    let a = std::f64::consts::FRAC_1_SQRT_2;
    bits.chunks(2)
        .map(|p| Complex64::new(a * (1.0 - 2.0 * p[0] as f64), a * (1.0 - 2.0 * p[1] as f64)))
        .collect()
}

/// Carrier positions in orthogonal-spacing units: `n * alpha` inside a
/// band, bands separated by `guard` spacings after their last carrier.
pub fn positions(n: usize, alpha_eff: f64, bands: Option<(usize, usize, usize)>) -> Vec<f64> {
    match bands {
        None => (0..n).map(|i| i as f64 * alpha_eff).collect(),
        Some((n_bands, size, guard)) => (0..n_bands)
            .flat_map(|b| {
                let start = b as f64 * ((size - 1) as f64 * alpha_eff + guard as f64);
                (0..size).map(move |i| start + i as f64 * alpha_eff)
            })
            .collect(),
    }
}

/// Direct sum `X_k = (1/sqrt(M')) sum_n s_n exp(j 2 pi p_n k / (N rho))`.
pub fn direct_sefdm(s: &[Complex64], pos: &[f64], retained: usize, ifft_len: usize) -> Vec<Complex64> {
    let scale = 1.0 / (ifft_len as f64).sqrt();
    (0..retained)
        .map(|k| {
            s.iter()
                .zip(pos)
                .map(|(x, p)| x * Complex64::from_polar(scale, TAU * p * k as f64 / retained as f64))
                .sum()
        })
        .collect()
}

/// `C[m][n] = (1/K) sum_k exp(j 2 pi (p_n - p_m) k / K)` with `K = N rho`.
pub fn direct_correlation(pos: &[f64], retained: usize) -> Vec<Vec<Complex64>> {
    pos.iter()
        .map(|pm| {
            pos.iter()
                .map(|pn| {
                    (0..retained)
                        .map(|k| Complex64::from_polar(1.0, TAU * (pn - pm) * k as f64 / retained as f64))
                        .sum::<Complex64>()
                        / retained as f64
                })
                .collect()
        })
        .collect()
}

/// Term-by-term worst-case SD counts.
pub fn sd_ops_by_summation(n: usize) -> (BigUint, BigUint) {
    let mut mults = BigUint::from(0u32);
    let mut adds = BigUint::from(0u32);
    for level in 1..=2 * n as u64 {
        let nodes = BigUint::from(1u32) << level;
        mults += &nodes * (2 * level + 1);
        adds += &nodes * (2 * level - 1);
    }
    (mults, adds)
}

/// Gaussian tail probability.
pub fn q_function(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(x / std::f64::consts::SQRT_2)
}

/// Uncoded Gray QPSK bit error rate at `eb_n0_db`.
pub fn qpsk_ber(eb_n0_db: f64) -> f64 {
    q_function((2.0 * 10f64.powf(eb_n0_db / 10.0)).sqrt())
}

/// Inverse of [`qpsk_ber`] by bisection.
pub fn qpsk_eb_n0_for(ber: f64) -> f64 {
    let (mut lo, mut hi) = (-10.0, 30.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if qpsk_ber(mid) > ber {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `J0(x) = (1/pi) int_0^pi cos(x sin t) dt`, trapezoid rule (spectrally
/// accurate for this periodic integrand).
pub fn bessel_j0(x: f64) -> f64 {
    let steps = 4000;
    let h = PI / steps as f64;
    let interior: f64 = (1..steps).map(|i| (x * (i as f64 * h).sin()).cos()).sum();
    (interior + 1.0) * h / PI
}

/// Exhaustive minimum-distance QPSK detection against carrier columns.
pub fn brute_force_ml(y: &[Complex64], columns: &[Vec<Complex64>]) -> Vec<u8> {
    let n = columns.len();
    let mut best = (f64::INFINITY, vec![]);
    for mask in 0..1u64 << (2 * n) {
        let bits: Vec<u8> = (0..2 * n).map(|i| (mask >> i & 1) as u8).collect();
        let s = qpsk(&bits);
        let metric: f64 = y
            .iter()
            .enumerate()
            .map(|(k, yk)| {
                let xk: Complex64 = s.iter().zip(columns).map(|(a, c)| a * c[k]).sum();
                (yk - xk).norm_sqr()
            })
            .sum();
        if metric < best.0 {
            best = (metric, bits);
        }
    }
    best.1
}
