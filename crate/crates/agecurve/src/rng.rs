//! Seed derivation and RNG construction.
//!
//! Every stochastic routine takes either an explicit RNG or a root seed from
//! which per-task seeds are derived, so replications, bootstrap draws, and
//! sweep cells can run in any order (or concurrently) and still reproduce
//! bit-identical results.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The RNG used throughout the crate. ChaCha8 has a stable, portable stream
/// for a given seed.
pub type CrateRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed from a root seed and two stream coordinates
/// (e.g. cell index and replication index).
pub fn derive_seed(root: u64, stream: u64, index: u64) -> u64 {
    let a = splitmix64(root ^ splitmix64(stream.wrapping_add(0x51_7c_c1_b7)));
    splitmix64(a ^ splitmix64(index.wrapping_add(0x2545_f491_4f6c_dd1d)))
}

/// Build an RNG from a seed.
pub fn rng_from_seed(seed: u64) -> CrateRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draw in the open interval (0, 1), safe to feed to an inverse CDF.
pub fn uniform_open(rng: &mut impl Rng) -> f64 {
    let u: f64 = rng.random();
    u.max(f64::MIN_POSITIVE)
}
