//! Deterministic substream derivation for reproducible parallel sampling.
//!
//! Every unit of random work (a period, a replication) draws from its own
//! stream keyed by `(seed, indices...)`, so results never depend on worker
//! count or scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// RNG for the substream identified by `(seed, path)`.
pub fn substream(seed: u64, path: &[u64]) -> ChaCha8Rng {
    let mut state = mix(seed ^ GOLDEN);
    for &p in path {
        state = mix(state.wrapping_add(GOLDEN).wrapping_add(p));
    }
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        state = mix(state.wrapping_add(GOLDEN));
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// A 64-bit seed derived for a nested component (e.g. one replication).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    mix(mix(seed ^ GOLDEN).wrapping_add(GOLDEN).wrapping_add(index))
}
