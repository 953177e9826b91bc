//! Gray-mapped QPSK with unit average symbol energy.
//!
//! Each symbol carries two bits. The first bit of a pair selects the sign of
//! the real part and the second the sign of the imaginary part, so the
//! mapping is `[b0, b1] -> ((1 - 2*b0) + j(1 - 2*b1)) / sqrt(2)`.

use std::ops::Deref;

use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Per-axis QPSK amplitude, `1/sqrt(2)`.
pub const QPSK_AMPLITUDE: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Ordered list of QPSK constellation points.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolVector(Vec<Complex64>);

impl SymbolVector {
    /// Wraps points that are already on the QPSK alphabet.
    pub fn new(symbols: Vec<Complex64>) -> Result<Self> {
        for (i, s) in symbols.iter().enumerate() {
            let on_grid = (s.re.abs() - QPSK_AMPLITUDE).abs() < 1e-9
                && (s.im.abs() - QPSK_AMPLITUDE).abs() < 1e-9;
            if !on_grid {
                return invalid(format!("symbol {i} ({s}) is not a QPSK point"));
            }
        }
        Ok(Self(symbols))
    }

    /// Builds a vector from `2N` bits.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        qpsk_map(bits)
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    pub fn mean_energy(&self) -> f64 {
        if self.0.is_empty() {
            return 0.0;
        }
        self.0.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.0.len() as f64
    }

    pub fn to_bits(&self) -> Vec<u8> {
        qpsk_demap_hard(&self.0)
    }
}

impl Deref for SymbolVector {
    type Target = [Complex64];

    fn deref(&self) -> &[Complex64] {
        &self.0
    }
}

#[inline]
fn axis(bit: u8) -> f64 {
    if bit == 0 {
        QPSK_AMPLITUDE
    } else {
        -QPSK_AMPLITUDE
    }
}

pub fn qpsk_map(bits: &[u8]) -> Result<SymbolVector> {
    if bits.len() % 2 != 0 {
        return invalid(format!("odd bit count {}", bits.len()));
    }
    if let Some(b) = bits.iter().find(|&&b| b > 1) {
        return invalid(format!("bit value {b} is not 0 or 1"));
    }
    Ok(SymbolVector(
        bits.chunks_exact(2)
            .map(|p| Complex64::new(axis(p[0]), axis(p[1])))
            .collect(),
    ))
}

/// Sign slicer. A zero real or imaginary part slices to bit 0.
pub fn qpsk_demap_hard(symbols: &[Complex64]) -> Vec<u8> {
    let mut bits = Vec::with_capacity(symbols.len() * 2);
    for s in symbols {
        bits.push(u8::from(s.re < 0.0));
        bits.push(u8::from(s.im < 0.0));
    }
    bits
}

/// Nearest QPSK point to each soft value.
pub fn qpsk_slice(soft: &[Complex64]) -> SymbolVector {
    SymbolVector(
        soft.iter()
            .map(|z| {
                Complex64::new(
                    if z.re < 0.0 { -QPSK_AMPLITUDE } else { QPSK_AMPLITUDE },
                    if z.im < 0.0 { -QPSK_AMPLITUDE } else { QPSK_AMPLITUDE },
                )
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im) * QPSK_AMPLITUDE
    }

    #[test]
    fn maps_constellation_corners() {
        assert_eq!(qpsk_map(&[0, 0]).unwrap().as_slice(), &[c(1.0, 1.0)]);
        assert_eq!(qpsk_map(&[1, 1]).unwrap().as_slice(), &[c(-1.0, -1.0)]);
        assert_eq!(
            qpsk_map(&[0, 1, 1, 0]).unwrap().as_slice(),
            &[c(1.0, -1.0), c(-1.0, 1.0)]
        );
    }

    #[test]
    fn odd_bit_count_is_rejected() {
        assert!(qpsk_map(&[0, 1, 1]).is_err());
        assert!(qpsk_map(&[0, 2]).is_err());
    }

    #[test]
    fn demap_slices_by_sign() {
        assert_eq!(qpsk_demap_hard(&[c(1.0, 1.0)]), vec![0, 0]);
        assert_eq!(qpsk_demap_hard(&[Complex64::new(-0.9, 0.1)]), vec![1, 0]);
        // tie-break: zero slices to 0
        assert_eq!(qpsk_demap_hard(&[Complex64::new(0.0, -0.0)]), vec![0, 0]);
    }

    #[test]
    fn round_trip_all_points() {
        for pair in [[0u8, 0], [0, 1], [1, 0], [1, 1]] {
            let s = qpsk_map(&pair).unwrap();
            assert_eq!(s.to_bits(), pair.to_vec());
        }
    }

    #[test]
    fn unit_average_energy() {
        let bits: Vec<u8> = (0..64).map(|i| ((i * 7 + 3) % 5 % 2) as u8).collect();
        let s = qpsk_map(&bits).unwrap();
        assert!((s.mean_energy() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_off_grid_points() {
        assert!(SymbolVector::new(vec![Complex64::new(1.0, 0.0)]).is_err());
    }
}
