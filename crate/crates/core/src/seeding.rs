//! Per-task seed derivation.
//!
//! `derive_seed(master, point, trajectory)` packs `(point, trajectory)` into one
//! 64-bit key and passes it through bijective mixing steps, so distinct keys under
//! one master seed always give distinct seeds.

/// SplitMix64 finalizer; a bijection on `u64`.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for `trajectory` at grid `point`. Both indices must fit in 32 bits.
pub fn derive_seed(master: u64, point: usize, trajectory: usize) -> u64 {
    assert!(point <= u32::MAX as usize && trajectory <= u32::MAX as usize);
    let key = ((point as u64) << 32) | trajectory as u64;
    mix64(mix64(key) ^ master)
}
