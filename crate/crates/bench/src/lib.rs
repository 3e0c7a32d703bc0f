//! Shared fixtures for the criterion benchmarks.

use chasmlab::BitVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Reproducible random bit vector for benchmark inputs.
pub fn fixture_bits(len: usize, seed: u64) -> BitVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.gen::<bool>()).collect()
}
