//! Replication seeds.
//!
//! Replication `i` of master seed `m` uses `mix(m + (i + 1) * GOLDEN)` where
//! `mix` is the SplitMix64 finaliser. `GOLDEN` is odd, so `i -> m + (i+1) GOLDEN`
//! is injective modulo `2^64`, and `mix` is a bijection; distinct `i` never
//! share a seed.

pub const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix(master.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN)))
}

pub fn derive_seeds(master: u64, count: usize) -> Vec<u64> {
    (0..count as u64).map(|i| derive_seed(master, i)).collect()
}
