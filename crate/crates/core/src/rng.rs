//! Per-sample random streams.
//!
//! Every trajectory draws from its own ChaCha8 stream selected by
//! `(seed, sample_id)`, so a sample's readouts do not depend on which worker
//! runs it or in which order.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

#[derive(Debug, Clone)]
pub struct SampleRng {
    inner: ChaCha8Rng,
}

impl SampleRng {
    pub fn new(seed: u64, sample_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(sample_id);
        Self { inner }
    }

    /// Uniform draw from the open interval `(0, 1)` on the 2⁻⁵³ lattice.
    pub fn uniform_open(&mut self) -> f64 {
        ((self.inner.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}
