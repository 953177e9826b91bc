//! A multi-band SEFDM signal at alpha = 0.8 attacked by receivers that
//! assume the wrong compression. Only the matched MultiSD receiver gets
//! below the error floor.
//!
//!     cargo run --release --example tuning_defence [max_frames]

use sefdm::experiments::{run_tuning_defence, TuningConfig};

fn main() -> sefdm::Result<()> {
    let max_frames = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(100);
    let cfg = TuningConfig {
        max_frames,
        master_seed: 7,
        ..TuningConfig::default()
    };
    let start = std::time::Instant::now();
    let report = run_tuning_defence(&cfg)?;

    print!("{:<22}", "Es/N0 (dB)");
    for es in &cfg.es_n0_grid_db {
        print!("{es:>10}");
    }
    println!();
    for curve in &report.curves {
        print!("{:<22}", curve.label);
        for p in &curve.points {
            print!("{:>10.2e}", p.ber);
        }
        println!();
    }
    for &es in cfg.es_n0_grid_db.iter().filter(|&&e| e >= 10.0) {
        let best = report.argmin_at(es).map(|c| c.label.as_str()).unwrap_or("-");
        println!("lowest BER at {es} dB: {best}");
    }
    eprintln!("elapsed {:.1?}", start.elapsed());
    Ok(())
}
