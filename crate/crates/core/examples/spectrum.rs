//! Averaged spectra of OFDM and SEFDM frames. Compression narrows the
//! occupied band in proportion to alpha.
//!
//!     cargo run --release --example spectrum

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sefdm::psd::{occupied_bandwidth, psd_estimate};
use sefdm::{qpsk_map, sefdm_modulate, IqFrame, WaveformConfig};

fn frames(cfg: &WaveformConfig, count: usize, rng: &mut ChaCha8Rng) -> sefdm::Result<Vec<IqFrame>> {
    (0..count)
        .map(|_| {
            let bits: Vec<u8> = (0..2 * cfg.n_subcarriers()).map(|_| rng.random_range(0..2)).collect();
            sefdm_modulate(&qpsk_map(&bits)?, cfg)
        })
        .collect()
}

fn main() -> sefdm::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut reference = None;
    for alpha in [1.0, 0.9, 0.8, 0.7] {
        let cfg = WaveformConfig::new(64, alpha, 8)?;
        let spectrum = psd_estimate(&frames(&cfg, 200, &mut rng)?, 512)?;
        let bw = occupied_bandwidth(&spectrum, 10.0);
        let base = *reference.get_or_insert(bw);
        println!(
            "alpha {alpha:<4} occupied {bw:.4} cycles/sample ({:.3} of OFDM)",
            bw / base
        );
    }
    Ok(())
}
