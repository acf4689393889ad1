// SPDX-License-Identifier: Apache-2.0

//! The sampling PRNG.
//!
//! All sampling draws from ChaCha20 (20 rounds, 64-bit block counter and
//! stream id both starting at zero). The 256-bit key is the seed as eight
//! little-endian bytes followed by 24 zero bytes. Each draw consumes two
//! consecutive 32-bit output words, low word first.
//!
//! Bounded integers use rejection: with `t = (2^64 - b) mod b`, draw `x`
//! until `x >= t` and return `x mod b`. Any implementation of these rules
//! reproduces the same samples.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub struct SampleRng {
    inner: ChaCha20Rng,
}

impl SampleRng {
    pub fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        SampleRng {
            inner: ChaCha20Rng::from_seed(key),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform integer in `0..bound`. `bound` must be non-zero.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let x = self.next_u64();
            if x >= threshold {
                return x % bound;
            }
        }
    }
}
