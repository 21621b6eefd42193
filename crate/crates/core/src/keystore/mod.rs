//! One-time-pad key material: generation, monotone consumption, persistence.
//!
//! A pool is owned by one execution context at a time. Nothing here locks;
//! callers sharing a pool must serialize access themselves.

pub mod pool;
pub mod rng;

use std::path::Path;

pub use pool::{read_history, KeyPool, KeySource, PersistentPool, PoolId};
pub use rng::{OsRandom, RandomSource, SeededRandom, ZeroRandom};

use crate::bits::BitString;
use crate::error::Result;

pub fn generate_pool<R: RandomSource + ?Sized>(nbits: usize, rng: &mut R) -> Result<KeyPool> {
    KeyPool::generate(nbits, rng)
}

pub fn take<K: KeySource + ?Sized>(pool: &mut K, nbits: usize) -> Result<BitString> {
    pool.take(nbits)
}

pub fn save(pool: &KeyPool, path: &Path) -> Result<()> {
    pool.save(path)
}

pub fn load(path: &Path) -> Result<KeyPool> {
    KeyPool::load(path)
}
