//! Command-line front end. Every subcommand reads an optional JSON config,
//! writes CSV/JSON/IQ files into `--out`, and reports failures as a JSON
//! object on stderr.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use sefdm::channel::{awgn, NoiseSpec};
use sefdm::complexity::{complexity_sweep, log10_big, ml_candidate_count, write_complexity_csv};
use sefdm::experiments::{
    export_dataset, read_predictions, replay_predictions, run_ber, run_scaling_defence, run_tuning_defence,
    write_ber_csv, BerCurve, DatasetConfig, ExperimentConfig, ReplayConfig, ScalingConfig, TuningConfig,
};
use sefdm::iq::write_frames;
use sefdm::psd::{occupied_bandwidth, psd_estimate, write_spectrum_csv};
use sefdm::rng::{derive_seed, rng_from, stream};
use sefdm::waveform::Modulator;
use sefdm::{qpsk_map, FrameMeta, IqFrame, WaveformConfig};

#[derive(Parser)]
#[command(name = "sefdm", version, about = "SEFDM waveform, channel and detector simulations")]
struct Cli {
    /// JSON configuration for the subcommand (defaults apply when omitted).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config's.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random-payload frames as an IQ file plus manifest.
    Gen,
    /// Averaged spectra for several compression factors.
    Psd,
    /// One BER curve, or a replay of classifier predictions.
    Ber {
        /// `frame_index,true_alpha,pred_alpha` CSV to replay.
        #[arg(long)]
        predictions: Option<PathBuf>,
    },
    /// Waveform-tuning defence: mismatched receivers against one signal.
    Tune,
    /// Waveform-scaling defence: small-N SD versus large-N MultiSD.
    Scale,
    /// Worst-case operation counts over a range of N.
    Complexity,
    /// Labelled IQ dataset for compression-factor classification.
    Dataset,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct GenConfig {
    waveform: WaveformConfig,
    frames: usize,
    /// Adds AWGN when set.
    es_n0_db: Option<f64>,
    master_seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            waveform: WaveformConfig::new(256, 0.8, 8).expect("valid default"),
            frames: 16,
            es_n0_db: None,
            master_seed: 0,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct PsdConfig {
    n_subcarriers: usize,
    oversampling: usize,
    alphas: Vec<f64>,
    frames: usize,
    nfft: usize,
    /// Level below the peak that bounds the occupied band.
    occupied_drop_db: f64,
    master_seed: u64,
}

impl Default for PsdConfig {
    fn default() -> Self {
        Self {
            n_subcarriers: 64,
            oversampling: 8,
            alphas: vec![1.0, 0.9, 0.8, 0.7],
            frames: 200,
            nfft: 512,
            occupied_drop_db: 10.0,
            master_seed: 0,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ComplexityConfig {
    n_values: Vec<usize>,
    block_size: usize,
}

impl Default for ComplexityConfig {
    fn default() -> Self {
        Self {
            n_values: (1..=9).map(|k| 1 << k).collect(),
            block_size: 8,
        }
    }
}

fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> sefdm::Result<T> {
    match path {
        Some(p) => Ok(serde_json::from_reader(BufReader::new(File::open(p)?))?),
        None => Ok(T::default()),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> sefdm::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn write_curve(dir: &Path, stem: &str, curve: &BerCurve) -> sefdm::Result<PathBuf> {
    let path = dir.join(format!("{stem}.csv"));
    let mut w = BufWriter::new(File::create(&path)?);
    write_ber_csv(&mut w, curve)?;
    w.flush()?;
    Ok(path)
}

fn slug(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' { c.to_ascii_lowercase() } else { '_' })
        .collect::<String>()
        .replace("alpha=", "")
}

fn random_frames(wave: &WaveformConfig, frames: usize, seed: u64) -> sefdm::Result<Vec<IqFrame>> {
    let tx = Modulator::for_config(wave)?;
    (0..frames as u64)
        .map(|f| {
            let mut rng = rng_from(derive_seed(seed, &[stream::BITS, f]));
            let bits: Vec<u8> = (0..2 * wave.n_subcarriers()).map(|_| rng.random::<bool>() as u8).collect();
            let meta = FrameMeta {
                alpha_effective: wave.alpha_effective(),
                n_subcarriers: wave.n_subcarriers(),
                oversampling: wave.oversampling(),
                es_n0_db: None,
                class_label: None,
                rng_seed: seed,
            };
            Ok(IqFrame::new(tx.modulate(&qpsk_map(&bits)?)?, meta))
        })
        .collect()
}

fn gen(cli: &Cli) -> sefdm::Result<()> {
    let mut cfg: GenConfig = load(cli.config.as_deref())?;
    if let Some(s) = cli.seed {
        cfg.master_seed = s;
    }
    let mut frames = random_frames(&cfg.waveform, cfg.frames, cfg.master_seed)?;
    if let Some(es) = cfg.es_n0_db {
        for (f, frame) in frames.iter_mut().enumerate() {
            *frame = awgn(frame, NoiseSpec::new(es), derive_seed(cfg.master_seed, &[stream::NOISE, f as u64]))?;
        }
    }
    let manifest = write_frames(&cli.out.join("frames.iq"), &cli.out.join("frames.json"), &frames)?;
    println!("{} frames x {} samples -> {}", manifest.frames, manifest.samples_per_frame, cli.out.display());
    Ok(())
}

#[derive(Serialize)]
struct PsdEntry {
    alpha_target: f64,
    alpha_effective: f64,
    occupied_bandwidth: f64,
    csv: String,
}

fn psd(cli: &Cli) -> sefdm::Result<()> {
    let mut cfg: PsdConfig = load(cli.config.as_deref())?;
    if let Some(s) = cli.seed {
        cfg.master_seed = s;
    }
    let mut entries = Vec::new();
    for &alpha in &cfg.alphas {
        let wave = WaveformConfig::new(cfg.n_subcarriers, alpha, cfg.oversampling)?;
        let frames = random_frames(&wave, cfg.frames, cfg.master_seed)?;
        let spectrum = psd_estimate(&frames, cfg.nfft)?;
        let name = format!("psd_{alpha}.csv");
        let mut w = BufWriter::new(File::create(cli.out.join(&name))?);
        write_spectrum_csv(&mut w, &spectrum)?;
        w.flush()?;
        entries.push(PsdEntry {
            alpha_target: alpha,
            alpha_effective: wave.alpha_effective(),
            occupied_bandwidth: occupied_bandwidth(&spectrum, cfg.occupied_drop_db),
            csv: name,
        });
    }
    write_json(&cli.out.join("psd.json"), &entries)?;
    for e in &entries {
        println!("alpha {:<5} occupied {:.4} cycles/sample", e.alpha_target, e.occupied_bandwidth);
    }
    Ok(())
}

fn ber(cli: &Cli, predictions: Option<&Path>) -> sefdm::Result<()> {
    if let Some(pred) = predictions {
        let mut cfg: ReplayConfig = load(cli.config.as_deref())?;
        if let Some(s) = cli.seed {
            cfg.master_seed = s;
        }
        let rows = read_predictions(BufReader::new(File::open(pred)?))?;
        let report = replay_predictions(&cfg, &rows)?;
        write_json(&cli.out.join("replay.json"), &report)?;
        for c in &report.classes {
            println!(
                "alpha {:<5} eavesdropper BER {:.3e}  legitimate BER {:.3e}  ({} frames)",
                c.true_alpha, c.eavesdropper_ber, c.legitimate_ber, c.frames
            );
        }
        return Ok(());
    }
    let mut cfg: ExperimentConfig = load(cli.config.as_deref())?;
    if let Some(s) = cli.seed {
        cfg.master_seed = s;
    }
    let curve = run_ber(&cfg)?;
    write_curve(&cli.out, "ber", &curve)?;
    write_json(&cli.out.join("ber.json"), &curve)?;
    for p in &curve.points {
        println!("{:>6} dB  BER {:.3e}{}", p.es_n0_db, p.ber, if p.low_confidence { " (low confidence)" } else { "" });
    }
    Ok(())
}

fn tune(cli: &Cli) -> sefdm::Result<()> {
    let mut cfg: TuningConfig = load(cli.config.as_deref())?;
    if let Some(s) = cli.seed {
        cfg.master_seed = s;
    }
    let report = run_tuning_defence(&cfg)?;
    for curve in &report.curves {
        write_curve(&cli.out, &format!("tune_{}", slug(&curve.label)), curve)?;
    }
    write_json(&cli.out.join("tuning.json"), &report)?;
    println!("{} curves -> {}", report.curves.len(), cli.out.display());
    Ok(())
}

fn scale(cli: &Cli) -> sefdm::Result<()> {
    let mut cfg: ScalingConfig = load(cli.config.as_deref())?;
    if let Some(s) = cli.seed {
        cfg.master_seed = s;
    }
    let r = run_scaling_defence(&cfg)?;
    write_curve(&cli.out, "scale_small_reference", &r.small_reference)?;
    write_curve(&cli.out, "scale_small_sd", &r.small_sd)?;
    write_curve(&cli.out, "scale_small_mf", &r.small_mf)?;
    write_curve(&cli.out, "scale_large_mf", &r.large_mf)?;
    write_curve(&cli.out, "scale_large_multisd", &r.large_multisd)?;
    write_json(&cli.out.join("scaling.json"), &r)?;
    println!(
        "SD at N={} refused; worst case 2^{:.1} multiplications",
        r.large_sd.n_subcarriers, r.large_sd.sd_multiplications_log2
    );
    Ok(())
}

#[derive(Serialize)]
struct ComplexityEntry {
    n: usize,
    sd_multiplications: String,
    sd_additions: String,
    sd_multiplications_log10: f64,
    candidates_log2: u64,
    multisd_multiplications: String,
    multisd_additions: String,
    fft_multiplications: String,
    fft_additions: String,
}

fn complexity(cli: &Cli) -> sefdm::Result<()> {
    let cfg: ComplexityConfig = load(cli.config.as_deref())?;
    let rows = complexity_sweep(&cfg.n_values, cfg.block_size)?;
    let mut w = BufWriter::new(File::create(cli.out.join("complexity.csv"))?);
    write_complexity_csv(&mut w, &rows)?;
    w.flush()?;
    let entries: Vec<ComplexityEntry> = rows
        .iter()
        .map(|r| ComplexityEntry {
            n: r.n_subcarriers,
            sd_multiplications: r.sd.multiplications.to_string(),
            sd_additions: r.sd.additions.to_string(),
            sd_multiplications_log10: log10_big(&r.sd.multiplications),
            candidates_log2: ml_candidate_count(r.n_subcarriers).bits() - 1,
            multisd_multiplications: r.multisd.multiplications.to_string(),
            multisd_additions: r.multisd.additions.to_string(),
            fft_multiplications: r.fft.multiplications.to_string(),
            fft_additions: r.fft.additions.to_string(),
        })
        .collect();
    write_json(&cli.out.join("complexity.json"), &entries)?;
    println!("{} rows -> {}", entries.len(), cli.out.join("complexity.csv").display());
    Ok(())
}

fn dataset(cli: &Cli) -> sefdm::Result<()> {
    let mut cfg: DatasetConfig = load(cli.config.as_deref())?;
    if let Some(s) = cli.seed {
        cfg.master_seed = s;
    }
    let m = export_dataset(&cfg, &cli.out)?;
    println!("{} frames in {} classes -> {}", m.total_frames, m.files.len(), cli.out.display());
    Ok(())
}

fn run(cli: &Cli) -> sefdm::Result<()> {
    std::fs::create_dir_all(&cli.out)?;
    match &cli.command {
        Command::Gen => gen(cli),
        Command::Psd => psd(cli),
        Command::Ber { predictions } => ber(cli, predictions.as_deref()),
        Command::Tune => tune(cli),
        Command::Scale => scale(cli),
        Command::Complexity => complexity(cli),
        Command::Dataset => dataset(cli),
    }
}

fn report(kind: &str, message: &str) -> ExitCode {
    let err = serde_json::json!({ "error": { "kind": kind, "message": message } });
    eprintln!("{err}");
    ExitCode::FAILURE
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return report("usage", e.to_string().trim()),
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(e.kind(), &e.to_string()),
    }
}
