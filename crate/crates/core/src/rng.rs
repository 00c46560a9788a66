//! Seedable randomness for the evaluate-then-verify decision procedures.
//!
//! Randomness only affects how much work gets done, never the answer: every
//! candidate produced from sampled points is re-verified symbolically.

use num::BigRational;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Default seed used across the toolkit.
pub const DEFAULT_SEED: u64 = 0xC0FFEE;

/// Deterministic sample source, passed explicitly wherever sampling happens.
#[derive(Debug, Clone)]
pub struct SampleRng {
    rng: ChaCha8Rng,
    seed: u64,
}

impl SampleRng {
    pub fn new(seed: u64) -> SampleRng {
        SampleRng { rng: ChaCha8Rng::seed_from_u64(seed), seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Small integer in {-7, ..., 7}.
    pub fn small_int(&mut self) -> i64 {
        self.rng.gen_range(-7i64..=7)
    }

    /// Small rational sample coordinate.
    pub fn small_rational(&mut self) -> BigRational {
        BigRational::from_integer(self.small_int().into())
    }

    /// Uniform f64 in the given range.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }
}

impl Default for SampleRng {
    fn default() -> Self {
        SampleRng::new(DEFAULT_SEED)
    }
}
