//! Deterministic RNG substreams. A run has one user-visible seed; every
//! consumer of randomness (fold shuffling, CRF init, LDA sampling) draws from
//! its own named stream so adding or reordering one consumer never perturbs
//! the others.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// FNV-1a, used only to turn a stream label into a stable 64-bit value.
/// Stability across platforms and releases matters more than hash quality.
fn fnv1a(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// The derived seed for the substream `label` of the run seeded by `seed`.
/// For consumers that take a plain seed instead of an RNG.
pub fn substream_seed(seed: u64, label: &str) -> u64 {
    seed ^ fnv1a(label)
}

/// RNG for the substream `label` of the run seeded by `seed`.
pub fn substream(seed: u64, label: &str) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(substream_seed(seed, label))
}
