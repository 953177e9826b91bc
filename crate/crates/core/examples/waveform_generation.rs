//! Build SEFDM frames, check the alpha = 1 case against a plain OFDM
//! transmitter, and round-trip a few frames through the IQ file format.
//!
//!     cargo run --example waveform_generation

use num_complex::Complex64;
use sefdm::iq::{read_frames, write_frames};
use sefdm::{ofdm_modulate, qpsk_map, sefdm_modulate, WaveformConfig};

fn main() -> sefdm::Result<()> {
    let bits: Vec<u8> = (0..32).map(|i| (i * 7 % 5 % 2) as u8).collect();
    let symbols = qpsk_map(&bits)?;

    for alpha in [1.0, 0.95, 0.8, 0.7] {
        let cfg = WaveformConfig::new(16, alpha, 8)?;
        let frame = sefdm_modulate(&symbols, &cfg)?;
        println!(
            "{cfg}: {} samples, energy per symbol {:.4}",
            frame.len(),
            frame.energy() / 16.0
        );
    }

    let ofdm = WaveformConfig::new(16, 1.0, 8)?;
    let a = sefdm_modulate(&symbols, &ofdm)?;
    let b = ofdm_modulate(&symbols, 8);
    let worst = a.samples.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    println!("alpha = 1 versus OFDM reference: max |diff| = {worst:.2e}");

    let dir = std::env::temp_dir().join("sefdm_waveform_example");
    std::fs::create_dir_all(&dir)?;
    let cfg = WaveformConfig::new(16, 0.8, 8)?;
    let frames = vec![sefdm_modulate(&symbols, &cfg)?; 3];
    let manifest = write_frames(&dir.join("frames.iq"), &dir.join("frames.json"), &frames)?;
    let back = read_frames(&dir.join("frames.iq"), &manifest)?;
    let err = back[0]
        .iter()
        .zip(&frames[0].samples)
        .map(|(x, y): (&Complex64, &Complex64)| (x - y).norm())
        .fold(0.0, f64::max);
    println!("IQ round trip of {} frames: max |diff| = {err:.2e} (f32 storage)", back.len());
    Ok(())
}
