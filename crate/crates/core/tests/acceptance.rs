//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod common;

use std::fs;
use std::path::Path;
use std::time::Instant;

use sefdm::channel::{awgn, NoiseSpec};
use sefdm::complexity::{fft_ops, multisd_upper_bound_ops, sd_upper_bound_ops, OpCount};
use sefdm::detect::{ml_detect, sphere_detect, DetectorId, RadiusPolicy};
use sefdm::experiments::{
    export_dataset, run_ber, run_scaling_defence, run_tuning_defence, write_ber_csv, BerCurve, DatasetConfig,
    ExperimentConfig, ScalingConfig, TuningConfig, TypeSet,
};
use sefdm::ici::{ici_power_average, ici_power_decompose};
use sefdm::{ofdm_modulate, qpsk_map, sefdm_modulate, WaveformConfig};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn orthogonality_reduction() -> Outcome {
    let mut rng = common::rng(101);
    let n = 16;
    let cfg = WaveformConfig::new(n, 1.0, 8).map_err(|e| e.to_string())?;
    let (mut worst_ici, mut worst_diff) = (0f64, 0f64);
    for _ in 0..1000 {
        let s = qpsk_map(&common::random_bits(&mut rng, 2 * n)).unwrap();
        worst_ici = worst_ici.max(ici_power_average(&s, &cfg).unwrap().interference.norm());
        let x = sefdm_modulate(&s, &cfg).unwrap();
        let reference = ofdm_modulate(&s, 8);
        for (a, b) in x.samples.iter().zip(&reference) {
            worst_diff = worst_diff.max((a - b).norm());
        }
    }
    check(
        worst_ici < 1e-12 && worst_diff <= 1e-12,
        format!("max interference {worst_ici:.2e}, max |SEFDM - OFDM| {worst_diff:.2e}"),
    )
}

fn power_consistency() -> Outcome {
    let mut rng = common::rng(102);
    let mut worst = 0f64;
    for n in [4, 12] {
        for alpha in [0.7, 0.75, 0.8, 0.85, 0.9, 0.95, 1.0] {
            let cfg = WaveformConfig::new(n, alpha, 8).unwrap();
            let pos = common::positions(n, cfg.alpha_effective(), None);
            let factor = cfg.ifft_len() as f64 / n as f64;
            for _ in 0..100 {
                let s = common::qpsk(&common::random_bits(&mut rng, 2 * n));
                let x = common::direct_sefdm(&s, &pos, cfg.samples_per_frame(), cfg.ifft_len());
                for (k, xk) in x.iter().enumerate() {
                    let p = ici_power_decompose(&s, &cfg, k).unwrap();
                    worst = worst.max((p.total() - factor * xk.norm_sqr()).abs());
                }
            }
        }
    }
    check(worst < 1e-10, format!("max deviation {worst:.2e}"))
}

fn sd_equals_ml() -> Outcome {
    let mut rng = common::rng(103);
    let (mut mismatches, mut failures, mut trials) = (0, 0, 0);
    for alpha in [1.0, 0.9, 0.8] {
        let cfg = WaveformConfig::new(4, alpha, 8).unwrap();
        for es in [0.0, 10.0, 20.0] {
            for t in 0..1000u64 {
                trials += 1;
                let s = qpsk_map(&common::random_bits(&mut rng, 8)).unwrap();
                let rx = match sefdm_modulate(&s, &cfg).and_then(|f| awgn(&f, NoiseSpec::new(es), t)) {
                    Ok(f) => f,
                    Err(_) => {
                        failures += 1;
                        continue;
                    }
                };
                match (ml_detect(&rx, &cfg), sphere_detect(&rx, &cfg, RadiusPolicy::BabaiShrink)) {
                    (Ok(a), Ok(b)) if a.bits == b.bits => {}
                    (Ok(_), Ok(_)) => mismatches += 1,
                    _ => failures += 1,
                }
            }
        }
    }
    check(
        mismatches == 0 && failures == 0,
        format!("{trials} trials, {mismatches} mismatches, {failures} errors"),
    )
}

fn ops(m: u64, a: u64) -> OpCount {
    OpCount::new(m, a)
}

fn complexity_formulas() -> Outcome {
    let mut problems = Vec::new();
    let sd1 = sd_upper_bound_ops(1).unwrap();
    let sd2 = sd_upper_bound_ops(2).unwrap();
    if sd1 != ops(26, 14) || sd2 != ops(226, 166) {
        problems.push(format!("sd(1) {sd1:?}, sd(2) {sd2:?}"));
    }
    for n in 1..=256 {
        let (m, a) = common::sd_ops_by_summation(n);
        let got = sd_upper_bound_ops(n).unwrap();
        if got.multiplications != m || got.additions != a {
            problems.push(format!("sd({n}) differs from summation"));
        }
    }
    for n in 1..=8 {
        if multisd_upper_bound_ops(n, n).unwrap() != sd_upper_bound_ops(n).unwrap() {
            problems.push(format!("multisd({n}, {n}) != sd({n})"));
        }
    }
    let fft = fft_ops(256).unwrap();
    if fft != ops(1024, 2048) {
        problems.push(format!("fft(256) {fft:?}"));
    }
    let big = sd_upper_bound_ops(256).unwrap();
    check(
        problems.is_empty(),
        if problems.is_empty() {
            format!("sd(256) has {} decimal digits of multiplications", big.multiplications.to_string().len())
        } else {
            problems.join("; ")
        },
    )
}

fn awgn_calibration() -> Outcome {
    let mut cfg = ExperimentConfig::new(
        WaveformConfig::new(64, 1.0, 8).unwrap(),
        DetectorId::Mf,
        (0..10).map(|i| 7.0 + 0.5 * i as f64).collect(),
    );
    cfg.min_bit_errors = 400;
    cfg.max_frames = 200_000;
    cfg.master_seed = 104;
    let curve = run_ber(&cfg).map_err(|e| e.to_string())?;
    let eb_offset = 10.0 * 2f64.log10();
    let mut used = 0;
    let mut worst = 0f64;
    for p in &curve.points {
        if p.bit_errors >= 100 && (1e-4..=1e-2).contains(&p.ber) {
            used += 1;
            let theory = common::qpsk_eb_n0_for(p.ber);
            worst = worst.max((p.es_n0_db - eb_offset - theory).abs());
        }
    }
    check(used >= 4 && worst <= 0.3, format!("{used} points, worst horizontal offset {worst:.3} dB"))
}

fn floor_of(curve: &BerCurve, hi: f64, lo: f64) -> Option<(f64, f64)> {
    Some((curve.point_at(lo)?.ber, curve.point_at(hi)?.ber))
}

fn scaling_defence(cfg: &ScalingConfig) -> Outcome {
    let r = run_scaling_defence(cfg).map_err(|e| e.to_string())?;
    let mut problems = Vec::new();
    let (sd_at, ref_at) = (r.small_sd.es_n0_at_ber(1e-3), r.small_reference.es_n0_at_ber(1e-3));
    let gap = match (sd_at, ref_at) {
        (Some(a), Some(b)) => a - b,
        _ => f64::INFINITY,
    };
    if !(gap.abs() <= 1.5) {
        problems.push(format!("SD gap {gap:.2} dB"));
    }
    match floor_of(&r.small_mf, 30.0, 20.0) {
        Some((b20, b30)) if b30 >= 0.5 * b20 && b30 >= 1e-3 => {}
        other => problems.push(format!("MF floor {other:?}")),
    }
    let expected = sd_upper_bound_ops(cfg.n_large).unwrap().multiplications.to_string();
    if r.large_sd.guard_error.is_none() || r.large_sd.sd_multiplications != expected {
        problems.push("SD not refused at large N".into());
    }
    let multisd_ok = cfg.guard_subcarriers >= 1
        && cfg.band_size <= 16
        && r.large_multisd.points.iter().any(|p| p.es_n0_db <= 20.0 && p.ber <= 1e-3);
    if !multisd_ok {
        problems.push("MultiSD never reaches 1e-3 by 20 dB".into());
    }
    let best = r
        .large_multisd
        .points
        .iter()
        .find(|p| p.ber <= 1e-3)
        .map(|p| format!("{} dB", p.es_n0_db))
        .unwrap_or_else(|| "never".into());
    check(
        problems.is_empty(),
        if problems.is_empty() {
            format!(
                "SD gap {gap:.2} dB; MF floor {:.1e}; SD({}) refused at 2^{:.1}; MultiSD <= 1e-3 at {best}",
                r.small_mf.point_at(30.0).unwrap().ber,
                cfg.n_large,
                r.large_sd.sd_multiplications_log2
            )
        } else {
            problems.join("; ")
        },
    )
}

fn tuning_defence(cfg: &TuningConfig) -> Outcome {
    let r = run_tuning_defence(cfg).map_err(|e| e.to_string())?;
    let matched = r.matched().ok_or("no matched curve")?;
    let mut problems = Vec::new();
    for p in matched.points.iter().filter(|p| p.es_n0_db >= 10.0) {
        let others = r.curves.iter().filter(|c| !std::ptr::eq(*c, matched));
        if let Some(c) = others
            .filter(|c| c.point_at(p.es_n0_db).is_some_and(|q| q.ber < p.ber))
            .next()
        {
            problems.push(format!("{} beats matched at {} dB", c.label, p.es_n0_db));
        }
    }
    let mismatched: Vec<&BerCurve> = r
        .curves
        .iter()
        .filter(|c| c.detector == DetectorId::MultiSd && c.detector_alpha != c.signal_alpha)
        .collect();
    for alpha in [0.9, 0.85, 0.75, 0.7] {
        match mismatched.iter().find(|c| (c.detector_alpha - alpha).abs() < 5e-3) {
            None => problems.push(format!("no MultiSD curve at alpha {alpha}")),
            Some(c) => match floor_of(c, 30.0, 20.0) {
                Some((b20, b30)) if b20 >= 1e-2 && b30 > 0.0 && b20 / b30 <= 2.0 && b30 / b20 <= 2.0 => {}
                other => problems.push(format!("{} has no floor: {other:?}", c.label)),
            },
        }
    }
    let worst_floor = mismatched
        .iter()
        .filter_map(|c| c.point_at(30.0).map(|p| p.ber))
        .fold(f64::INFINITY, f64::min);
    check(
        problems.is_empty(),
        if problems.is_empty() {
            format!(
                "matched argmin from 10 dB; lowest mismatched BER at 30 dB {worst_floor:.2e}; matched at 10 dB {:.2e}",
                matched.point_at(10.0).map(|p| p.ber).unwrap_or(f64::NAN)
            )
        } else {
            problems.join("; ")
        },
    )
}

fn csv_bytes(curve: &BerCurve) -> Vec<u8> {
    let mut out = Vec::new();
    write_ber_csv(&mut out, curve).unwrap();
    out
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn determinism(scaling: &ScalingConfig, tuning: &TuningConfig) -> Outcome {
    let mut problems = Vec::new();

    let mut ber_cfg = ExperimentConfig::default();
    ber_cfg.max_frames = 500;
    let a = run_ber(&ber_cfg).map_err(|e| e.to_string())?;
    let b = run_ber(&ber_cfg).map_err(|e| e.to_string())?;
    if csv_bytes(&a) != csv_bytes(&b) || serde_json::to_vec(&a).unwrap() != serde_json::to_vec(&b).unwrap() {
        problems.push("ber");
    }

    let t1 = serde_json::to_vec(&run_tuning_defence(tuning).unwrap()).unwrap();
    let t2 = serde_json::to_vec(&run_tuning_defence(tuning).unwrap()).unwrap();
    if t1 != t2 {
        problems.push("tuning");
    }

    let s1 = run_scaling_defence(scaling).unwrap();
    let s2 = run_scaling_defence(scaling).unwrap();
    if serde_json::to_vec(&s1).unwrap() != serde_json::to_vec(&s2).unwrap()
        || csv_bytes(&s1.large_multisd) != csv_bytes(&s2.large_multisd)
    {
        problems.push("scaling");
    }

    let ds = DatasetConfig {
        type_set: TypeSet::TypeII,
        frames_per_class: 20,
        master_seed: 108,
        ..DatasetConfig::default()
    };
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    export_dataset(&ds, d1.path()).map_err(|e| e.to_string())?;
    export_dataset(&ds, d2.path()).map_err(|e| e.to_string())?;
    let (f1, f2) = (dir_bytes(d1.path()), dir_bytes(d2.path()));
    if f1.is_empty() || f1 != f2 {
        problems.push("dataset");
    }

    check(
        problems.is_empty(),
        if problems.is_empty() {
            format!("ber, tuning, scaling and a {}-file dataset reproduce byte for byte", f1.len())
        } else {
            format!("differs: {}", problems.join(", "))
        },
    )
}

fn main() {
    let scaling = ScalingConfig::default();
    let tuning = TuningConfig::default();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("orthogonality reduction", Box::new(orthogonality_reduction)),
        ("power decomposition consistency", Box::new(power_consistency)),
        ("sphere decoding equals ML", Box::new(sd_equals_ml)),
        ("complexity formulas", Box::new(complexity_formulas)),
        ("AWGN calibration", Box::new(awgn_calibration)),
        ("scaling defence", Box::new(|| scaling_defence(&scaling))),
        ("tuning defence", Box::new(|| tuning_defence(&tuning))),
        ("determinism", Box::new(|| determinism(&scaling, &tuning))),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(run))
            .unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS {name}: {d} ({secs:.1}s)"),
            Err(d) => {
                failed += 1;
                println!("FAIL {name}: {d} ({secs:.1}s)");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
