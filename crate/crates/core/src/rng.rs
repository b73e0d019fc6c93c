//! Seeded random streams.
//!
//! Every Monte Carlo routine in this crate draws from ChaCha8, a counter-based
//! generator. A run is identified by a 64-bit seed; each independent work item
//! (a grid point, a replication, or a block of draws) gets its own ChaCha
//! stream whose id packs `(point, item)` as `point << 32 | item`. Work items can
//! therefore be evaluated in any order, on any number of threads, and the
//! results are reduced in index order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Generator for work item `item` of grid point `point` under `seed`.
pub fn stream(seed: u64, point: u32, item: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(point, item));
    rng
}

#[inline]
pub fn stream_id(point: u32, item: u32) -> u64 {
    ((point as u64) << 32) | item as u64
}

/// Draws per block in block-partitioned Monte Carlo.
pub const BLOCK_SIZE: usize = 16_384;

/// Splits `draws` into blocks of [`BLOCK_SIZE`], runs `block` on each with its
/// own stream, and returns the per-block results in block order.
pub fn map_blocks<T, F>(seed: u64, point: u32, draws: usize, block: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> T + Sync,
{
    let blocks = draws.div_ceil(BLOCK_SIZE);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let len = BLOCK_SIZE.min(draws - b * BLOCK_SIZE);
            let mut rng = stream(seed, point, b as u32);
            block(&mut rng, len)
        })
        .collect()
}
