//! Deterministic RNG streams.
//!
//! Each (experiment, index, sample) triple gets its own ChaCha8 stream, so
//! samples can run in any order or in parallel without changing the draws.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Domain tags keep streams from colliding across pipelines.
#[derive(Debug, Clone, Copy)]
pub enum Domain {
    Sweep = 1,
    RealWorld = 2,
    SyntheticRecords = 3,
}

/// A dedicated stream for one sample of one experiment.
pub fn sample_rng(seed: u64, domain: Domain, index: u64, sample: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((domain as u64) << 56) ^ (index << 28) ^ sample);
    rng
}
