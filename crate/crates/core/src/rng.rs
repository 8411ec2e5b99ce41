//! The simulation random stream.
//!
//! All runs use PCG-64 (`Lcg128Xsl64`) seeded through `SeedableRng::seed_from_u64`.
//! The generator and its seeding are fully specified, so a seed reproduces the
//! same stream on every platform.

use rand::SeedableRng;

pub type SimRng = rand_pcg::Pcg64;

pub fn seeded(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Seed for an auxiliary stream derived from a run seed.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    // splitmix64 finalizer over the combined value
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
