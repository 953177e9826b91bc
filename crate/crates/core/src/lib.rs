//! Baseband simulation of spectrally efficient FDM (SEFDM) waveforms and
//! the detectors a legitimate receiver or an eavesdropper would use.
//!
//! The crate covers waveform synthesis, inter-carrier interference
//! analysis, spectra, a Rician multipath channel, MF/ML/SD/MultiSD
//! detection, complexity bounds, and reproducible experiment drivers.

pub mod channel;
pub mod complexity;
pub mod detect;
pub mod error;
pub mod experiments;
pub mod ici;
pub mod iq;
pub mod psd;
pub mod qpsk;
pub mod rng;
pub mod waveform;

pub use error::{Error, Result};
pub use iq::{FrameMeta, IqFrame, IqManifest};
pub use qpsk::{qpsk_demap_hard, qpsk_map, SymbolVector};
pub use waveform::{multiband_modulate, ofdm_modulate, sefdm_modulate, BandPlan, WaveformConfig};
