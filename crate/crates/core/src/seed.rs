//! Deterministic seed derivation for parallel Monte Carlo.
//!
//! Every random draw in the workspace is keyed by an explicit 64-bit seed.
//! Parallel workers derive per-task seeds with [`mix`] so results do not
//! depend on scheduling or worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
fn splitmix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from a master seed and a stream index.
pub fn mix(master: u64, stream: u64) -> u64 {
    splitmix(master ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x2545_F491_4F6C_DD1D))
}

/// Derive a seed from a master seed and several stream indices
/// (experiment, time step, trial, ...).
pub fn mix_many(master: u64, streams: &[u64]) -> u64 {
    let mut s = master;
    for (i, &v) in streams.iter().enumerate() {
        s = mix(s, v ^ ((i as u64 + 1) << 56));
    }
    s
}

/// Seeded RNG used throughout the crate.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
