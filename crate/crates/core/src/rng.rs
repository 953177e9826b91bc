//! Seed derivation. Every stochastic step draws from its own ChaCha stream
//! seeded from `(master_seed, indices...)`, so results do not depend on the
//! order in which frames are processed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(master), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

pub fn rng_from(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Stream tags, so bits, noise and fading of one frame never share a stream.
pub mod stream {
    pub const BITS: u64 = 1;
    pub const NOISE: u64 = 2;
    pub const FADING: u64 = 3;
    /// Prefix for dataset-export frames.
    pub const DATASET: u64 = 4;
    /// Prefix for prediction-replay frames.
    pub const REPLAY: u64 = 5;
}
