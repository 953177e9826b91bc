//! IQ frames and their on-disk format.
//!
//! Samples are stored as little-endian interleaved `f32` pairs
//! (`re, im, re, im, ...`), frames back to back, with a JSON sidecar
//! manifest describing the layout.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameMeta {
    pub alpha_effective: f64,
    pub n_subcarriers: usize,
    pub oversampling: usize,
    pub es_n0_db: Option<f64>,
    pub class_label: Option<u32>,
    pub rng_seed: u64,
}

/// One multicarrier symbol of complex baseband samples.
#[derive(Debug, Clone, PartialEq)]
pub struct IqFrame {
    pub samples: Vec<Complex64>,
    pub meta: FrameMeta,
}

impl IqFrame {
    pub fn new(samples: Vec<Complex64>, meta: FrameMeta) -> Self {
        Self { samples, meta }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|x| x.norm_sqr()).sum()
    }

    pub fn mean_sample_energy(&self) -> f64 {
        if self.samples.is_empty() {
            0.0
        } else {
            self.energy() / self.samples.len() as f64
        }
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|x| x.re.is_finite() && x.im.is_finite())
    }

    pub(crate) fn with_samples(&self, samples: Vec<Complex64>) -> Self {
        Self {
            samples,
            meta: self.meta.clone(),
        }
    }
}

/// JSON sidecar for a contiguous IQ file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IqManifest {
    pub n_subcarriers: usize,
    pub alpha_effective: f64,
    pub oversampling: usize,
    pub frames: usize,
    pub samples_per_frame: usize,
    pub labels: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_target: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub es_n0_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data_file: Option<String>,
}

impl IqManifest {
    pub fn describe(frames: &[IqFrame]) -> Result<Self> {
        let first = match frames.first() {
            Some(f) => f,
            None => return invalid("no frames to describe"),
        };
        let spf = first.len();
        if frames.iter().any(|f| f.len() != spf) {
            return invalid("frames have different lengths");
        }
        Ok(Self {
            n_subcarriers: first.meta.n_subcarriers,
            alpha_effective: first.meta.alpha_effective,
            oversampling: first.meta.oversampling,
            frames: frames.len(),
            samples_per_frame: spf,
            labels: frames
                .iter()
                .map(|f| f.meta.class_label.unwrap_or(0))
                .collect(),
            alpha_target: None,
            es_n0_db: first.meta.es_n0_db,
            data_file: None,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut w, self)?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
    }
}

pub fn write_samples<W: Write>(mut w: W, samples: &[Complex64]) -> Result<()> {
    let mut buf = Vec::with_capacity(samples.len() * 8);
    for x in samples {
        buf.extend_from_slice(&(x.re as f32).to_le_bytes());
        buf.extend_from_slice(&(x.im as f32).to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_samples<R: Read>(mut r: R) -> Result<Vec<Complex64>> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() % 8 != 0 {
        return invalid(format!("{} bytes is not a whole number of IQ pairs", bytes.len()));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| {
            let re = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
            let im = f32::from_le_bytes([c[4], c[5], c[6], c[7]]);
            Complex64::new(re as f64, im as f64)
        })
        .collect())
}

/// Writes `frames` contiguously to `data_path` and the manifest next to it.
pub fn write_frames(data_path: &Path, manifest_path: &Path, frames: &[IqFrame]) -> Result<IqManifest> {
    let mut manifest = IqManifest::describe(frames)?;
    manifest.data_file = data_path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned());
    let mut w = BufWriter::new(File::create(data_path)?);
    for f in frames {
        write_samples(&mut w, &f.samples)?;
    }
    w.flush()?;
    manifest.write(manifest_path)?;
    Ok(manifest)
}

/// Reads back the frames described by `manifest`.
pub fn read_frames(data_path: &Path, manifest: &IqManifest) -> Result<Vec<Vec<Complex64>>> {
    let samples = read_samples(BufReader::new(File::open(data_path)?))?;
    let expected = manifest.frames * manifest.samples_per_frame;
    if samples.len() != expected {
        return invalid(format!(
            "{} samples on disk, manifest describes {expected}",
            samples.len()
        ));
    }
    Ok(samples
        .chunks_exact(manifest.samples_per_frame.max(1))
        .map(<[Complex64]>::to_vec)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn meta() -> FrameMeta {
        FrameMeta {
            alpha_effective: 0.8,
            n_subcarriers: 2,
            oversampling: 2,
            es_n0_db: Some(20.0),
            class_label: Some(3),
            rng_seed: 7,
        }
    }

    #[test]
    fn sample_bytes_are_little_endian_interleaved() {
        let mut out = Vec::new();
        write_samples(&mut out, &[Complex64::new(1.0, -2.0)]).unwrap();
        assert_eq!(&out[..4], &1.0f32.to_le_bytes());
        assert_eq!(&out[4..], &(-2.0f32).to_le_bytes());
    }

    #[test]
    fn truncated_file_is_rejected() {
        assert!(read_samples(&[0u8; 7][..]).is_err());
    }

    #[test]
    fn frames_and_manifest_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let frames: Vec<IqFrame> = (0..3)
            .map(|i| IqFrame::new(vec![Complex64::new(i as f64, 0.5); 4], meta()))
            .collect();
        let data = dir.path().join("x.iq");
        let man = dir.path().join("x.json");
        let written = write_frames(&data, &man, &frames).unwrap();
        let back = IqManifest::read(&man).unwrap();
        assert_eq!(written, back);
        assert_eq!(back.frames, 3);
        assert_eq!(back.samples_per_frame, 4);
        assert_eq!(back.labels, vec![3, 3, 3]);
        let samples = read_frames(&data, &back).unwrap();
        assert_eq!(samples[2][0], Complex64::new(2.0, 0.5));
    }

    proptest! {
        #[test]
        fn f32_round_trip_is_within_single_precision(re in -1e3f64..1e3, im in -1e3f64..1e3) {
            let mut out = Vec::new();
            write_samples(&mut out, &[Complex64::new(re, im)]).unwrap();
            let back = read_samples(&out[..]).unwrap();
            prop_assert!((back[0].re - re).abs() <= re.abs() * 1e-7 + 1e-30);
            prop_assert!((back[0].im - im).abs() <= im.abs() * 1e-7 + 1e-30);
        }
    }
}
