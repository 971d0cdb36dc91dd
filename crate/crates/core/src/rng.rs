//! Seeded random streams.
//!
//! Every stochastic operation takes a `u64` seed and builds its own
//! [`ChaCha8Rng`]; sub-streams are derived by mixing labels into the seed so
//! that independent consumers never share state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `base` and a path of labels.
pub fn derive_seed(base: u64, labels: &[u64]) -> u64 {
    labels
        .iter()
        .fold(splitmix64(base), |acc, &label| splitmix64(acc ^ splitmix64(label)))
}

/// Stream labels shared across modules.
pub mod stream {
    pub const PARTICLES: u64 = 0x7061_7274;
    pub const TARGET: u64 = 0x7461_7267;
    pub const NET_INIT: u64 = 0x696e_6974;
    pub const TRAIN: u64 = 0x7472_6e00;
    pub const EVAL: u64 = 0x6576_616c;
    pub const OUTER: u64 = 0x6f75_7472;
}
