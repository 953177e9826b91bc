//! Self-interference of compressed subcarriers: the correlation operator,
//! its smallest eigenvalue, and a per-sample power split.
//!
//!     cargo run --example ici_analysis

use num_complex::Complex64;
use sefdm::ici::{correlation_operator, ici_power_decompose};
use sefdm::waveform::BandPlan;
use sefdm::WaveformConfig;

fn main() -> sefdm::Result<()> {
    println!("{:>6} {:>12} {:>14} {:>12}", "alpha", "|C[0][1]|", "max off-diag", "min eig");
    for alpha in [1.0, 0.9, 0.8, 0.7, 0.5] {
        let cfg = WaveformConfig::new(16, alpha, 8)?;
        let c = correlation_operator(&cfg)?;
        println!(
            "{alpha:>6} {:>12.4} {:>14.4} {:>12.3e}",
            c.get(0, 1).norm(),
            c.max_offdiag_by(|_, _| true),
            c.min_eigenvalue()
        );
    }

    let cfg = WaveformConfig::new(16, 0.8, 8)?;
    let s: Vec<Complex64> = (0..16)
        .map(|i| Complex64::new(if i % 3 == 0 { -1.0 } else { 1.0 }, if i % 2 == 0 { 1.0 } else { -1.0 }) * std::f64::consts::FRAC_1_SQRT_2)
        .collect();
    println!("\nsample  signal  interference");
    for k in [0, 1, 5, 64, 127] {
        let p = ici_power_decompose(&s, &cfg, k)?;
        println!("{k:>6}  {:.3}  {:+.4}", p.signal, p.interference.re);
    }

    let banded = WaveformConfig::new(16, 0.8, 8)?.with_band_plan(BandPlan::uniform(16, 4, 2)?)?;
    let c = correlation_operator(&banded)?;
    let band = |n: usize| n / 4;
    let intra = c.max_offdiag_by(|m, n| band(m) == band(n));
    let cross = c.max_offdiag_by(|m, n| band(m) != band(n));
    println!("\n4 bands of 4, guard 2: intra-band max {intra:.4}, cross-band max {cross:.4}");
    Ok(())
}
