mod common;

use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use proptest::prelude::*;
use sefdm::complexity::{fft_ops, multisd_upper_bound_ops, sd_upper_bound_ops};
use sefdm::detect::ObservationModel;
use sefdm::ici::{correlation_operator, ici_power_decompose};
use sefdm::waveform::{BandPlan, Modulator};
use sefdm::{multiband_modulate, ofdm_modulate, qpsk_demap_hard, qpsk_map, sefdm_modulate, WaveformConfig};

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn contiguous_frames_match_direct_sum() {
    let mut rng = common::rng(1);
    for &(n, rho) in &[(4, 1), (12, 8), (16, 4), (64, 8)] {
        for alpha in [1.0, 0.95, 0.9, 0.85, 0.8, 0.75, 0.7, 0.5] {
            let cfg = WaveformConfig::new(n, alpha, rho).unwrap();
            let bits = common::random_bits(&mut rng, 2 * n);
            let frame = sefdm_modulate(&qpsk_map(&bits).unwrap(), &cfg).unwrap();
            let pos = common::positions(n, cfg.alpha_effective(), None);
            let oracle = common::direct_sefdm(&common::qpsk(&bits), &pos, n * rho, cfg.ifft_len());
            assert!(max_diff(&frame.samples, &oracle) < 1e-9, "N={n} rho={rho} alpha={alpha}");
        }
    }
}

#[test]
fn multiband_frames_match_direct_sum() {
    let mut rng = common::rng(2);
    for &(bands, size, guard, alpha) in &[(2, 2, 1, 0.5), (4, 4, 1, 0.8), (4, 8, 2, 0.8), (3, 5, 3, 0.7), (2, 4, 2, 0.95)] {
        let n = bands * size;
        let cfg = WaveformConfig::new(n, alpha, 8)
            .unwrap()
            .with_band_plan(BandPlan::uniform(n, size, guard).unwrap())
            .unwrap();
        let bits = common::random_bits(&mut rng, 2 * n);
        let frame = multiband_modulate(&qpsk_map(&bits).unwrap(), &cfg).unwrap();
        let pos = common::positions(n, cfg.alpha_effective(), Some((bands, size, guard)));
        let layout = cfg.layout().unwrap();
        for (p, q) in layout.positions().iter().zip(&pos) {
            assert_abs_diff_eq!(p, q, epsilon = 1e-9);
        }
        let oracle = common::direct_sefdm(&common::qpsk(&bits), &pos, n * 8, cfg.ifft_len());
        assert!(max_diff(&frame.samples, &oracle) < 1e-9, "{cfg}");
    }
}

#[test]
fn worked_layout_example() {
    let cfg = WaveformConfig::new(4, 0.5, 8)
        .unwrap()
        .with_band_plan(BandPlan::new(2, 2, 1).unwrap())
        .unwrap();
    let pos = cfg.layout().unwrap().positions();
    for (p, q) in pos.iter().zip([0.0, 0.5, 1.5, 2.0]) {
        assert_abs_diff_eq!(*p, q, epsilon = 1e-12);
    }
}

#[test]
fn orthogonal_case_is_ofdm() {
    let mut rng = common::rng(3);
    for n in [1, 4, 12, 256] {
        let cfg = WaveformConfig::new(n, 1.0, 8).unwrap();
        let bits = common::random_bits(&mut rng, 2 * n);
        let s = qpsk_map(&bits).unwrap();
        let frame = sefdm_modulate(&s, &cfg).unwrap();
        assert!(max_diff(&frame.samples, &ofdm_modulate(&s, 8)) < 1e-12);
    }
}

#[test]
fn correlation_operator_matches_direct_sum() {
    for &(n, alpha, bands) in &[(8, 0.8, None), (12, 0.7, None), (16, 0.8, Some((4, 4, 2))), (9, 0.9, Some((3, 3, 1)))] {
        let mut cfg = WaveformConfig::new(n, alpha, 8).unwrap();
        if let Some((b, size, guard)) = bands {
            cfg = cfg.with_band_plan(BandPlan::new(b, size, guard).unwrap()).unwrap();
        }
        let c = correlation_operator(&cfg).unwrap();
        let oracle = common::direct_correlation(&common::positions(n, cfg.alpha_effective(), bands), n * 8);
        for m in 0..n {
            for k in 0..n {
                assert!((c.get(m, k) - oracle[m][k]).norm() < 1e-10, "{cfg} ({m},{k})");
            }
        }
        assert!(c.hermitian_error() < 1e-12);

        // Phi^H Phi = alpha * C
        let gram = ObservationModel::new(&cfg).unwrap().gram();
        for m in 0..n {
            for k in 0..n {
                assert!((gram[m][k] - c.get(m, k) * cfg.alpha_effective()).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn guard_bands_reduce_cross_band_coupling() {
    for &(size, guard, alpha) in &[(4, 1, 0.8), (8, 2, 0.8), (8, 1, 0.7), (16, 2, 0.9)] {
        let n = 4 * size;
        let cfg = WaveformConfig::new(n, alpha, 8)
            .unwrap()
            .with_band_plan(BandPlan::uniform(n, size, guard).unwrap())
            .unwrap();
        let c = correlation_operator(&cfg).unwrap();
        let intra = c.max_offdiag_by(|m, k| m / size == k / size);
        let cross = c.max_offdiag_by(|m, k| m / size != k / size);
        assert!(cross <= intra, "{cfg}: cross {cross} intra {intra}");
    }
}

#[test]
fn power_split_matches_direct_sample_power() {
    let mut rng = common::rng(4);
    for n in [4, 12] {
        for alpha in [0.7, 0.8, 0.9, 1.0] {
            let cfg = WaveformConfig::new(n, alpha, 8).unwrap();
            let bits = common::random_bits(&mut rng, 2 * n);
            let s = common::qpsk(&bits);
            let x = common::direct_sefdm(&s, &common::positions(n, cfg.alpha_effective(), None), n * 8, cfg.ifft_len());
            let factor = cfg.ifft_len() as f64 / n as f64;
            for (k, xk) in x.iter().enumerate() {
                let p = ici_power_decompose(&s, &cfg, k).unwrap();
                assert!((p.total() - factor * xk.norm_sqr()).abs() < 1e-10);
                assert!(p.interference.im.abs() < 1e-10);
            }
        }
    }
}

#[test]
fn operation_counts_match_summation() {
    for n in 1..=48 {
        let ops = sd_upper_bound_ops(n).unwrap();
        let (m, a) = common::sd_ops_by_summation(n);
        assert_eq!(ops.multiplications, m, "N={n}");
        assert_eq!(ops.additions, a, "N={n}");
    }
    for n in 1..=8 {
        assert_eq!(multisd_upper_bound_ops(n, n).unwrap(), sd_upper_bound_ops(n).unwrap());
    }
    let four = multisd_upper_bound_ops(4, 2).unwrap();
    assert_eq!(four.multiplications, 452u32.into());
    assert_eq!(four.additions, 332u32.into());
    for n in [8, 16, 64] {
        let one = multisd_upper_bound_ops(n, 8).unwrap();
        let two = multisd_upper_bound_ops(2 * n, 8).unwrap();
        assert_eq!(two.multiplications, &one.multiplications * 2u32);
        assert_eq!(two.additions, &one.additions * 2u32);
    }
    for k in 1..=12u32 {
        let n = 1usize << k;
        let f = fft_ops(n).unwrap();
        assert_eq!(f.multiplications, (n as u64 / 2 * k as u64).into());
        assert_eq!(f.additions, (n as u64 * k as u64).into());
    }
}

fn bits_strategy(max_pairs: usize) -> impl Strategy<Value = Vec<u8>> {
    (1..=max_pairs).prop_flat_map(|n| prop::collection::vec(0u8..2, 2 * n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn qpsk_round_trip(bits in bits_strategy(64)) {
        prop_assert_eq!(qpsk_demap_hard(&qpsk_map(&bits).unwrap()), bits);
    }

    #[test]
    fn modulation_is_linear_and_energy_bounded(
        bits_a in prop::collection::vec(0u8..2, 24),
        bits_b in prop::collection::vec(0u8..2, 24),
        alpha_pct in 60u32..=100,
    ) {
        let cfg = WaveformConfig::new(12, alpha_pct as f64 / 100.0, 8).unwrap();
        let m = Modulator::for_config(&cfg).unwrap();
        let a = common::qpsk(&bits_a);
        let b = common::qpsk(&bits_b);
        let sum: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x + y * 0.5).collect();
        let xa = m.modulate(&a).unwrap();
        let xb = m.modulate(&b).unwrap();
        let xs = m.modulate(&sum).unwrap();
        for k in 0..xs.len() {
            prop_assert!((xs[k] - xa[k] - xb[k] * 0.5).norm() < 1e-10);
        }
        // energy lies between the extreme eigenvalues of alpha * C times |s|^2
        let energy: f64 = xa.iter().map(|x| x.norm_sqr()).sum();
        let c = correlation_operator(&cfg).unwrap();
        let alpha = cfg.alpha_effective();
        prop_assert!(energy >= alpha * c.min_eigenvalue() * 12.0 - 1e-9);
        prop_assert!(energy <= alpha * 12.0 * 12.0 + 1e-9);
    }

    #[test]
    fn adjoint_identity(
        bits in prop::collection::vec(0u8..2, 32),
        y_re in prop::collection::vec(-1.0f64..1.0, 128),
        y_im in prop::collection::vec(-1.0f64..1.0, 128),
    ) {
        let cfg = WaveformConfig::new(16, 0.8, 8).unwrap()
            .with_band_plan(BandPlan::uniform(16, 4, 2).unwrap()).unwrap();
        let m = Modulator::for_config(&cfg).unwrap();
        let s = common::qpsk(&bits);
        let y: Vec<Complex64> = y_re.iter().zip(&y_im).map(|(a, b)| Complex64::new(*a, *b)).collect();
        let lhs: Complex64 = m.modulate(&s).unwrap().iter().zip(&y).map(|(x, y)| x.conj() * y).sum();
        let rhs: Complex64 = s.iter().zip(m.correlate(&y).unwrap()).map(|(a, b)| a.conj() * b).sum();
        prop_assert!((lhs - rhs).norm() < 1e-10);
    }
}
