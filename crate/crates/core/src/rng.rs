//! Seed derivation.
//!
//! Every random stream in the crate is a ChaCha8 generator. Independent
//! sub-streams (per hypothesis, per center, per restart) are obtained by
//! seeding with the parent seed and selecting the ChaCha stream number
//! `tag`, so that stream `tag` of seed `s` never overlaps stream `tag'`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream `tag` of `seed`.
pub fn stream(seed: u64, tag: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(tag);
    r
}

/// Stream tag for center `index` of hypothesis `k` (1 or 2).
pub fn center_tag(k: usize, index: usize) -> u64 {
    ((k as u64) << 40) | index as u64
}
