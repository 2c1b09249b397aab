//! Counter-based randomness.
//!
//! `keyed_u64(key, counter)` is the SplitMix64 output at position `counter`
//! of the stream whose state is derived from `key`. It is a pure function, so
//! per-edge and per-trial draws do not depend on evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
pub const fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn key_state(key: u64) -> u64 {
    mix64(key ^ 0x6A09_E667_F3BC_C908)
}

#[inline]
pub fn keyed_u64(key: u64, counter: u64) -> u64 {
    mix64(
        key_state(key).wrapping_add(counter.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)),
    )
}

/// Uniform in `[0, 1)` with 53 bits of precision.
#[inline]
pub fn keyed_uniform(key: u64, counter: u64) -> f64 {
    to_unit(keyed_u64(key, counter))
}

#[inline]
pub fn to_unit(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Seed of child `index` of `parent` (per-trial seeds, per-stage seeds, ...).
///
/// Fixed mixing function: `keyed_u64(parent, index)`.
#[inline]
pub fn derive_seed(parent: u64, index: u64) -> u64 {
    keyed_u64(parent, index)
}

/// Sequential generator for the stream `(seed, stream)`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, stream))
}

/// Cheap sequential generator used where millions of short streams are needed.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self {
            state: key_state(seed),
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in `(0, 1]`, safe to take the logarithm of.
    #[inline]
    pub fn next_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
