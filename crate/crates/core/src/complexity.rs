//! Worst-case operation counts for SD, MultiSD and FFT detection.
//!
//! The SD bound is the full expansion of the `2N`-level real tree, with a
//! node at depth `n` costing `2n + 1` multiplications and `2n - 1`
//! additions. Counts reach roughly `2^513` at `N = 256`, so they are kept as
//! exact big integers and only converted to logarithms for tabulation.

use std::io::Write;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpCount {
    pub multiplications: BigUint,
    pub additions: BigUint,
}

impl OpCount {
    pub fn new(multiplications: impl Into<BigUint>, additions: impl Into<BigUint>) -> Self {
        Self {
            multiplications: multiplications.into(),
            additions: additions.into(),
        }
    }

    fn scaled(&self, k: u64) -> Self {
        Self {
            multiplications: &self.multiplications * k,
            additions: &self.additions * k,
        }
    }
}

impl std::ops::Add for OpCount {
    type Output = OpCount;

    fn add(self, rhs: OpCount) -> OpCount {
        OpCount {
            multiplications: self.multiplications + rhs.multiplications,
            additions: self.additions + rhs.additions,
        }
    }
}

/// `log2` of an exact integer, accurate to double precision.
pub fn log2_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().expect("fits in 64 bits") as f64).log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().expect("64 leading bits");
    (top as f64).log2() + shift as f64
}

pub fn log10_big(x: &BigUint) -> f64 {
    log2_big(x) * std::f64::consts::LOG10_2
}

/// Full-expansion SD cost for `n_subcarriers` complex symbols (`L = 2N`
/// real levels), in closed form:
/// `mults = (2L - 1) 2^(L+1) + 2`, `adds = (2L - 3) 2^(L+1) + 6`.
pub fn sd_upper_bound_ops(n_subcarriers: usize) -> Result<OpCount> {
    if n_subcarriers == 0 {
        return invalid("SD needs at least one subcarrier");
    }
    let levels = 2 * n_subcarriers as u64;
    let pow = BigUint::one() << (levels + 1);
    let mults = &pow * (2 * levels - 1) + 2u32;
    let adds = &pow * (2 * levels - 3) + 6u32;
    Ok(OpCount::new(mults, adds))
}

/// Candidate count `4^N = 2^(2N)` of exhaustive QPSK detection.
pub fn ml_candidate_count(n_subcarriers: usize) -> BigUint {
    BigUint::one() << (2 * n_subcarriers)
}

/// `(N / N_B)` independent SD blocks of `N_B` subcarriers.
pub fn multisd_upper_bound_ops(n_subcarriers: usize, block_size: usize) -> Result<OpCount> {
    if block_size == 0 || n_subcarriers == 0 || n_subcarriers % block_size != 0 {
        return invalid(format!(
            "{n_subcarriers} subcarriers do not split into blocks of {block_size}"
        ));
    }
    Ok(sd_upper_bound_ops(block_size)?.scaled((n_subcarriers / block_size) as u64))
}

/// Radix-2 FFT: `(N/2) log2 N` multiplications, `N log2 N` additions.
pub fn fft_ops(n_points: usize) -> Result<OpCount> {
    if n_points < 2 || !n_points.is_power_of_two() {
        return invalid(format!("FFT size {n_points} is not a power of two >= 2"));
    }
    let log = n_points.trailing_zeros() as u64;
    let n = n_points as u64;
    Ok(OpCount::new(BigUint::from(n / 2 * log), BigUint::from(n * log)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityRow {
    pub n_subcarriers: usize,
    pub sd: OpCount,
    pub multisd: OpCount,
    pub fft: OpCount,
}

/// Tabulates the three calculators for every `N` in `n_list`.
///
/// `N` need not be a multiple of `block_size`: a trailing partial block is
/// costed at its own size. The FFT column uses the next power of two.
pub fn complexity_sweep(n_list: &[usize], block_size: usize) -> Result<Vec<ComplexityRow>> {
    if block_size == 0 {
        return invalid("block size must be positive");
    }
    n_list
        .iter()
        .map(|&n| {
            let full = n / block_size;
            let rest = n % block_size;
            let mut multisd = if full > 0 {
                multisd_upper_bound_ops(full * block_size, block_size)?
            } else {
                OpCount::new(0u32, 0u32)
            };
            if rest > 0 {
                multisd = multisd + sd_upper_bound_ops(rest)?;
            }
            Ok(ComplexityRow {
                n_subcarriers: n,
                sd: sd_upper_bound_ops(n)?,
                multisd,
                fft: fft_ops(n.next_power_of_two().max(2))?,
            })
        })
        .collect()
}

pub const COMPLEXITY_CSV_HEADER: &str =
    "N,sd_mults_log2,multisd_mults,fft_mults,sd_adds_log2,multisd_adds,fft_adds";

pub fn write_complexity_csv<W: Write>(mut w: W, rows: &[ComplexityRow]) -> Result<()> {
    writeln!(w, "{COMPLEXITY_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{:.6},{},{},{:.6},{},{}",
            r.n_subcarriers,
            log2_big(&r.sd.multiplications),
            r.multisd.multiplications,
            r.fft.multiplications,
            log2_big(&r.sd.additions),
            r.multisd.additions,
            r.fft.additions
        )?;
    }
    Ok(())
}
