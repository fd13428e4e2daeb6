//! Deterministic random number generation.
//!
//! All randomness in the crate flows through [`Rng`], a thin wrapper around
//! ChaCha8 whose output stream is fixed by construction: the same seed
//! yields the same sequence on every platform and every release. Helpers
//! for sub-seeding let independent stages (initialisation, fold assignment,
//! negative sampling) consume disjoint streams derived from one master seed
//! without coordinating draw counts.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Purpose tag for coefficient initialisation streams.
pub const TAG_INIT: u64 = 1;
/// Purpose tag for fold-assignment streams.
pub const TAG_FOLDS: u64 = 2;
/// Purpose tag for negative-sampling streams.
pub const TAG_NEGATIVES: u64 = 3;
/// Purpose tag for per-fold fit streams.
pub const TAG_FIT: u64 = 4;
/// Purpose tag for validation-fold streams during tuning.
pub const TAG_VALIDATION: u64 = 5;

const GAMMA64: u64 = 0x9E37_79B9_7F4A_7C15;

/// Splitmix64 finalizer. Bijective on u64, used only for seed mixing.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(GAMMA64);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a sub-seed from a master seed and a list of tags.
///
/// Tags identify the consumer (a purpose constant, fold index, ratio index
/// and so on). Each tag is folded into the state through splitmix64, so
/// distinct tag sequences give statistically independent streams while the
/// mapping itself stays reproducible.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    let mut state = splitmix64(master);
    for &tag in tags {
        state = splitmix64(state ^ splitmix64(tag));
    }
    state
}

/// Seeded random stream with the utility draws the crate needs.
///
/// The generator is ChaCha8 seeded by repeating the 8-byte seed across the
/// 32-byte key. Floating point draws take the top 53 bits of one `u64`, so
/// results do not depend on any external distribution crate.
pub struct Rng {
    inner: ChaCha8Rng,
}

impl Rng {
    /// Creates a stream from a 64-bit seed.
    pub fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&seed.to_le_bytes());
        }
        Rng {
            inner: ChaCha8Rng::from_seed(key),
        }
    }

    /// Next raw 64-bit draw.
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform draw from `[0, 1)` with 53-bit resolution.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw from `[0, bound)`.
    pub fn uniform_below(&mut self, bound: f64) -> f64 {
        self.uniform() * bound
    }

    /// Unbiased integer draw from `{0, .., n-1}` by rejection.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0) is undefined");
        // Lemire-style rejection: retry while the draw falls in the short
        // final window that would bias the modulus.
        let threshold = n.wrapping_neg() % n;
        loop {
            let x = self.next_u64();
            let (hi, lo) = {
                let wide = (x as u128) * (n as u128);
                ((wide >> 64) as u64, wide as u64)
            };
            if lo >= threshold {
                return hi;
            }
        }
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    /// Draws `k` distinct indices from `{0, .., n-1}` without replacement.
    ///
    /// Uses a partial Fisher-Yates pass over an index vector, so the cost
    /// is `O(n)` memory and `O(n + k)` time. Panics if `k > n`.
    pub fn sample_distinct(&mut self, n: usize, k: usize) -> Vec<usize> {
        assert!(k <= n, "cannot sample {k} distinct values from {n}");
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.below((n - i) as u64) as usize;
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool
    }
}
