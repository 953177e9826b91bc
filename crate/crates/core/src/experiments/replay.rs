//! Replays an eavesdropping classifier's per-frame predictions: each frame
//! is sent at its true compression and detected with the predicted one.

use std::collections::BTreeMap;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use super::{banded_waveform, count_errors, random_bits, ChannelMode, Link};
use crate::detect::{DetectorId, MultiSdOptions};
use crate::error::{invalid, Result};
use crate::rng::{derive_seed, stream};
use crate::waveform::WaveformConfig;

pub const PREDICTIONS_CSV_HEADER: &str = "frame_index,true_alpha,pred_alpha";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub frame_index: u64,
    pub true_alpha: f64,
    pub pred_alpha: f64,
}

/// Parses `frame_index,true_alpha,pred_alpha` rows (header required).
pub fn read_predictions<R: BufRead>(r: R) -> Result<Vec<Prediction>> {
    let mut lines = r.lines();
    let header = lines.next().transpose()?;
    if header.as_deref().map(str::trim) != Some(PREDICTIONS_CSV_HEADER) {
        return invalid(format!("predictions must start with \"{PREDICTIONS_CSV_HEADER}\""));
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let bad = || invalid(format!("predictions line {}: \"{line}\"", i + 2));
        if fields.len() != 3 {
            return bad();
        }
        let (Ok(frame_index), Ok(true_alpha), Ok(pred_alpha)) =
            (fields[0].parse(), fields[1].parse(), fields[2].parse())
        else {
            return bad();
        };
        out.push(Prediction {
            frame_index,
            true_alpha,
            pred_alpha,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReplayConfig {
    /// Layout template; its compression is replaced per frame.
    pub waveform: WaveformConfig,
    pub detector: DetectorId,
    pub channel: ChannelMode,
    pub es_n0_db: f64,
    pub master_seed: u64,
    pub multisd: MultiSdOptions,
}

impl Default for ReplayConfig {
    fn default() -> Self {
        Self {
            waveform: banded_waveform(256, 1.0, 8, 8, 2).expect("valid default layout"),
            detector: DetectorId::MultiSd,
            channel: ChannelMode::Awgn,
            es_n0_db: 20.0,
            master_seed: 0,
            multisd: MultiSdOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayClass {
    pub true_alpha: f64,
    pub frames: u64,
    pub correctly_classified: u64,
    pub bits: u64,
    /// Errors of the receiver that trusted the prediction.
    pub eavesdropper_errors: u64,
    pub eavesdropper_ber: f64,
    /// Errors of a receiver that knows the true compression.
    pub legitimate_errors: u64,
    pub legitimate_ber: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub es_n0_db: f64,
    pub detector: DetectorId,
    pub classes: Vec<ReplayClass>,
    pub overall: ReplayClass,
}

fn key(a: f64) -> u64 {
    a.to_bits()
}

pub fn replay_predictions(cfg: &ReplayConfig, predictions: &[Prediction]) -> Result<ReplayReport> {
    if predictions.is_empty() {
        return invalid("no predictions to replay");
    }
    let mut links: BTreeMap<(u64, u64), Link> = BTreeMap::new();
    let mut classes: BTreeMap<u64, ReplayClass> = BTreeMap::new();
    for p in predictions {
        for pair in [(p.true_alpha, p.pred_alpha), (p.true_alpha, p.true_alpha)] {
            if let std::collections::btree_map::Entry::Vacant(e) = links.entry((key(pair.0), key(pair.1))) {
                let signal = cfg.waveform.with_alpha(pair.0)?;
                let rx = cfg.waveform.with_alpha(pair.1)?;
                e.insert(Link::new(&signal, cfg.detector, &rx, cfg.channel, cfg.multisd)?);
            }
        }
        let eve = &links[&(key(p.true_alpha), key(p.pred_alpha))];
        let bob = &links[&(key(p.true_alpha), key(p.true_alpha))];
        let f = p.frame_index;
        let bits = random_bits(eve.bits_per_frame(), derive_seed(cfg.master_seed, &[stream::REPLAY, stream::BITS, f]));
        let noise = derive_seed(cfg.master_seed, &[stream::REPLAY, stream::NOISE, f]);
        let fading = derive_seed(cfg.master_seed, &[stream::REPLAY, stream::FADING, f]);
        let eve_errors = count_errors(&bits, &eve.run(&bits, cfg.es_n0_db, noise, fading)?.bits);
        let bob_errors = count_errors(&bits, &bob.run(&bits, cfg.es_n0_db, noise, fading)?.bits);

        let c = classes.entry(key(p.true_alpha)).or_insert_with(|| empty(p.true_alpha));
        c.frames += 1;
        c.correctly_classified += u64::from(p.pred_alpha == p.true_alpha);
        c.bits += bits.len() as u64;
        c.eavesdropper_errors += eve_errors;
        c.legitimate_errors += bob_errors;
    }
    let mut classes: Vec<ReplayClass> = classes.into_values().map(finish).collect();
    classes.sort_by(|a, b| b.true_alpha.total_cmp(&a.true_alpha));
    let overall = finish(classes.iter().fold(empty(f64::NAN), |mut acc, c| {
        acc.frames += c.frames;
        acc.correctly_classified += c.correctly_classified;
        acc.bits += c.bits;
        acc.eavesdropper_errors += c.eavesdropper_errors;
        acc.legitimate_errors += c.legitimate_errors;
        acc
    }));
    Ok(ReplayReport {
        es_n0_db: cfg.es_n0_db,
        detector: cfg.detector,
        classes,
        overall,
    })
}

fn empty(true_alpha: f64) -> ReplayClass {
    ReplayClass {
        true_alpha,
        frames: 0,
        correctly_classified: 0,
        bits: 0,
        eavesdropper_errors: 0,
        eavesdropper_ber: 0.0,
        legitimate_errors: 0,
        legitimate_ber: 0.0,
    }
}

fn finish(mut c: ReplayClass) -> ReplayClass {
    let bits = c.bits.max(1) as f64;
    c.eavesdropper_ber = c.eavesdropper_errors as f64 / bits;
    c.legitimate_ber = c.legitimate_errors as f64 / bits;
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_predictions() {
        let text = "frame_index,true_alpha,pred_alpha\n0,0.8,0.8\n1, 0.8 ,0.9\n\n";
        let p = read_predictions(text.as_bytes()).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p[1].pred_alpha, 0.9);
        assert!(read_predictions("a,b,c\n".as_bytes()).is_err());
        assert!(read_predictions("frame_index,true_alpha,pred_alpha\n1,x,0.9\n".as_bytes()).is_err());
    }

    #[test]
    fn misclassified_frames_cost_the_eavesdropper() {
        let cfg = ReplayConfig {
            waveform: banded_waveform(32, 1.0, 4, 8, 2).unwrap(),
            es_n0_db: f64::INFINITY,
            ..ReplayConfig::default()
        };
        let preds: Vec<Prediction> = (0..6)
            .map(|i| Prediction {
                frame_index: i,
                true_alpha: 0.8,
                pred_alpha: if i < 3 { 0.8 } else { 0.7 },
            })
            .collect();
        let r = replay_predictions(&cfg, &preds).unwrap();
        assert_eq!(r.classes.len(), 1);
        let c = &r.classes[0];
        assert_eq!((c.frames, c.correctly_classified, c.legitimate_errors), (6, 3, 0));
        assert!(c.eavesdropper_errors > 0);
        assert_eq!(r.overall.bits, 6 * 64);
    }
}
