//! Reproducible random streams.
//!
//! Every replica of every experiment draws from its own ChaCha8 stream. The key is the
//! user's master seed, the 64-bit stream id is a hash of (experiment tag, replica index),
//! and the block counter does the rest. Two replicas never share a stream, and a replica's
//! numbers do not depend on how many workers run alongside it.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A seeded, counter-based random stream.
#[derive(Clone, Debug)]
pub struct RandomStream(ChaCha8Rng);

impl RandomStream {
    /// Stream 0 under `seed`.
    pub fn from_seed(seed: u64) -> Self {
        Self::derive(seed, 0, 0)
    }

    /// Stream for replica `index` of the experiment identified by `tag`.
    pub fn derive(seed: u64, tag: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(splitmix64(splitmix64(tag) ^ index));
        RandomStream(rng)
    }

    /// Stream for replica `index`, keyed by an experiment name.
    pub fn for_replica(seed: u64, experiment: &str, index: u64) -> Self {
        Self::derive(seed, tag_of(experiment), index)
    }
}

impl RngCore for RandomStream {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

/// FNV-1a of an experiment name, used as a stream tag.
pub fn tag_of(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
