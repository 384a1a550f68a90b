//! Counter-based randomness.
//!
//! Every random quantity in the crate is a pure function of `(seed, index)`:
//! word `j` of stream `seed` is the `j`-th 64-bit output of ChaCha8 keyed by
//! `seed`, addressed directly through the cipher's block counter. Scans can be
//! split at any word boundary and still see the same bits.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed for item `index` of a run seeded with `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(mix64(master ^ 0x9e37_79b9_7f4a_7c15).wrapping_add(mix64(index.wrapping_add(1))))
}

/// Child seed for a named sub-stream (domain separation).
pub fn derive_named(master: u64, label: &str) -> u64 {
    label
        .bytes()
        .fold(mix64(master), |acc, b| mix64(acc ^ u64::from(b)))
}

/// Sequential reader of 64-bit words from stream `seed`, starting at any word.
pub struct WordStream {
    rng: ChaCha8Rng,
}

impl WordStream {
    pub fn new(seed: u64, first_word: u64) -> Self {
        let mut key = [0u8; 32];
        for (i, chunk) in key.chunks_mut(8).enumerate() {
            chunk.copy_from_slice(&mix64(seed.wrapping_add(i as u64)).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        // word_pos counts 32-bit words
        rng.set_word_pos(u128::from(first_word) * 2);
        Self { rng }
    }

    #[inline]
    pub fn next_word(&mut self) -> u64 {
        self.rng.next_u64()
    }
}

/// Random access to a single word (slow path; scans should use [`WordStream`]).
pub fn word_at(seed: u64, word: u64) -> u64 {
    WordStream::new(seed, word).next_word()
}

/// Deterministic small RNG for draws inside a trial (family choices, offsets).
pub fn trial_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
