use serde::{Deserialize, Serialize};

/// Maps a composite key to a 1-based server id, identically everywhere.
pub trait KeyRouter: Sync {
    fn route(&self, key: u64, rank: u64) -> usize;
}

/// Seeded hash standing in for a public random oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyHasher {
    pub seed: u64,
    pub p: usize,
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl KeyHasher {
    pub fn new(seed: u64, p: usize) -> Self {
        assert!(p >= 1);
        KeyHasher { seed, p }
    }
}

impl KeyRouter for KeyHasher {
    fn route(&self, key: u64, rank: u64) -> usize {
        let h = mix(mix(self.seed ^ mix(key)) ^ rank);
        1 + ((h as u128 * self.p as u128) >> 64) as usize
    }
}

/// Router backed by a closure, e.g. a fixed table in examples and tests.
pub struct FnRouter<F>(pub F);

impl<F: Fn(u64, u64) -> usize + Sync> KeyRouter for FnRouter<F> {
    fn route(&self, key: u64, rank: u64) -> usize {
        (self.0)(key, rank)
    }
}
