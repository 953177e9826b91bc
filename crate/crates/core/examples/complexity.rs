//! Worst-case operation counts: full sphere decoding explodes, block
//! decoding grows linearly in N, and an FFT receiver is cheaper still.
//!
//!     cargo run --example complexity

use sefdm::complexity::{complexity_sweep, fft_ops, log10_big, ml_candidate_count, sd_upper_bound_ops, write_complexity_csv};

fn main() -> sefdm::Result<()> {
    for n in [1, 2, 12, 256] {
        let ops = sd_upper_bound_ops(n)?;
        println!(
            "SD N={n:<4} ~10^{:<7.2} multiplications, ~10^{:<7.2} additions, 4^N = 10^{:.2} candidates",
            log10_big(&ops.multiplications),
            log10_big(&ops.additions),
            log10_big(&ml_candidate_count(n))
        );
    }
    let fft = fft_ops(256)?;
    println!("FFT N=256: {} multiplications, {} additions\n", fft.multiplications, fft.additions);

    let rows = complexity_sweep(&[8, 16, 32, 64, 128, 256, 512], 8)?;
    write_complexity_csv(std::io::stdout().lock(), &rows)?;
    Ok(())
}
