//! Seeded random streams.
//!
//! All randomness in the crate flows from a single master seed. Independent
//! streams (one per replication, per flight, per solver run) are derived with
//! ChaCha8's stream mechanism so results are reproducible across runs and
//! platforms and no component consumes another's draws.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Reserved stream id for the runway service process within a replication.
pub const STREAM_RUNWAY: u64 = 0;

/// Derives the replication-level seed from the master seed.
pub fn replication_seed(master_seed: u64, replication: u64) -> u64 {
    mix(master_seed ^ mix(replication.wrapping_add(0x9e37_79b9_7f4a_7c15)))
}

/// A deterministic RNG for one (seed, stream) pair.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stable 64-bit hash of a flight id, used as a per-flight stream id.
///
/// FNV-1a; `std`'s hasher is not guaranteed stable across releases.
pub fn flight_stream(id: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in id.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    // Keep flight streams disjoint from the reserved ids.
    h | 0x8000_0000_0000_0000
}

fn mix(mut x: u64) -> u64 {
    // splitmix64 finalizer
    x ^= x >> 30;
    x = x.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^= x >> 31;
    x
}
