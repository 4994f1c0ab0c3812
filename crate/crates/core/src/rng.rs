//! Counter-based stream derivation.
//!
//! Every random stream in the crate is a ChaCha8 generator whose seed is a
//! pure function of a master seed and a path of integer labels (trial id,
//! class index, ...). Results therefore never depend on scheduling or on the
//! number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Mixes `labels` into `master`. Different label paths give unrelated seeds.
pub fn derive_seed(master: u64, labels: &[u64]) -> u64 {
    labels
        .iter()
        .fold(splitmix64(master), |acc, &l| splitmix64(acc ^ splitmix64(l.wrapping_add(0x632B_E59B_D9B4_E019))))
}

pub fn stream(master: u64, labels: &[u64]) -> Stream {
    ChaCha8Rng::seed_from_u64(derive_seed(master, labels))
}
