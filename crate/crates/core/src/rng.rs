//! Seeded, platform-independent randomness.
//!
//! All randomness goes through [`ChaCha8Rng`], whose output stream is fixed by
//! its specification and therefore identical on every platform. Per-item
//! streams are derived by mixing the base seed with the item index through
//! SplitMix64 so neighbouring indices do not yield correlated generators.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type Rng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the `index`-th independent stream under `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index))
}

pub fn derived_rng(seed: u64, index: u64) -> Rng {
    rng_from_seed(derive_seed(seed, index))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng as _;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| 0).scan(derived_rng(7, 0), |r, _: u64| Some(r.gen())).collect();
        let b: Vec<u64> = (0..4).map(|_| 0).scan(derived_rng(7, 0), |r, _: u64| Some(r.gen())).collect();
        let c: Vec<u64> = (0..4).map(|_| 0).scan(derived_rng(7, 1), |r, _: u64| Some(r.gen())).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
