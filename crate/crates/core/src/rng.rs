//! Named, reproducible RNG substreams.
//!
//! Every stochastic stage derives its generator from the master seed and a
//! stable stream name, so stages can be reordered or parallelized without
//! perturbing each other's draws.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Stable 64-bit FNV-1a. `std`'s default hasher is not guaranteed stable
/// across releases, and stream derivation must never change.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Derive a child seed from a master seed and a stream name.
pub fn derive_seed(master: u64, name: &str) -> u64 {
    splitmix(master ^ fnv1a(name.as_bytes()))
}

/// RNG for the named substream of `master`.
pub fn substream(master: u64, name: &str) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(derive_seed(master, name))
}

/// RNG for a numbered item (document, player, …) within a named substream.
pub fn substream_indexed(master: u64, name: &str, index: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(splitmix(derive_seed(master, name) ^ splitmix(index)))
}
