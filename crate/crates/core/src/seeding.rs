//! Deterministic random streams.
//!
//! Every experiment cell draws from its own ChaCha8 stream whose seed is
//! `splitmix64(master ^ splitmix64(ordinal))`. The formula only depends on the
//! master seed and the cell's position in the grid, so serial and parallel
//! runs see the same numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// One round of the SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of cell `ordinal` under `master`.
pub fn cell_seed(master: u64, ordinal: u64) -> u64 {
    splitmix64(master ^ splitmix64(ordinal))
}

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cell_rng(master: u64, ordinal: u64) -> Rng {
    rng_from_seed(cell_seed(master, ordinal))
}
