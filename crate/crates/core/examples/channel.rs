//! The reference multipath profile: tap layout, a fading realisation,
//! carrier offset and noise, then genie equalisation.
//!
//!     cargo run --release --example channel

use sefdm::channel::{add_noise, apply_cfo, equalize_with_taps, noise_variance, rician_multipath, ChannelProfile, NoiseSpec};
use sefdm::{qpsk_map, sefdm_modulate, WaveformConfig};

fn main() -> sefdm::Result<()> {
    let profile = ChannelProfile::table1();
    println!("tap delays (samples): {:?}", profile.delay_samples());
    println!("tap powers (linear):  {:.3?}", profile.normalized_powers());
    println!("carrier offset: {} Hz", profile.frequency_offset_hz());

    let cfg = WaveformConfig::new(256, 0.8, 8)?;
    let bits: Vec<u8> = (0..512).map(|i| ((i * 31 + 7) % 11 % 2) as u8).collect();
    let tx = sefdm_modulate(&qpsk_map(&bits)?, &cfg)?;

    let (faded, trace) = rician_multipath(&tx, &profile, 2024)?;
    let gains = trace.mean_gains();
    println!("mean tap gains: {:.3?}", gains.iter().map(|g| g.norm()).collect::<Vec<_>>());
    let drift: f64 = trace.gains[0].first().zip(trace.gains[0].last()).map(|(a, b)| (a - b).norm()).unwrap_or(0.0);
    println!("tap 0 drift across the frame: {drift:.2e}");

    let variance = noise_variance(&tx, NoiseSpec::new(20.0));
    let noisy = add_noise(&faded, variance, 1)?;
    let eq = equalize_with_taps(&noisy, &trace);
    let mse: f64 = eq.samples.iter().zip(&tx.samples).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>() / tx.len() as f64;
    println!(
        "equalised at 20 dB: error/signal power = {:.2e}",
        mse / tx.mean_sample_energy()
    );

    let rotated = apply_cfo(&tx, &profile);
    let turn = (rotated.samples[1] / tx.samples[1]).arg() - (rotated.samples[0] / tx.samples[0]).arg();
    println!("CFO phase step per sample: {turn:.5} rad");
    Ok(())
}
