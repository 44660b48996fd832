//! Deterministic seed derivation for independent RNG streams.
//!
//! Every stochastic component (solver restarts, mini-batch draws, fading,
//! per-trial state) gets its own stream derived from the experiment seed, so
//! results do not depend on thread scheduling or evaluation order.

pub(crate) const TAG_INIT_ACTION: u64 = 0x01;
pub(crate) const TAG_SB: u64 = 0x02;
pub(crate) const TAG_TRAIN: u64 = 0x03;
pub(crate) const TAG_ENV: u64 = 0x04;
pub(crate) const TAG_TRIAL: u64 = 0x05;
pub(crate) const TAG_STRUCTURE: u64 = 0x06;
pub(crate) const TAG_WHITEBOX: u64 = 0x07;
pub(crate) const TAG_RESTART: u64 = 0x08;
pub(crate) const TAG_RANDOM_ACTION: u64 = 0x09;

pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Fold a base seed with a salt into a new, statistically independent seed.
pub(crate) fn derive(base: u64, salt: u64) -> u64 {
    splitmix64(base ^ splitmix64(salt))
}

/// Three-part derivation: `derive(derive(base, a), b)`.
pub(crate) fn derive2(base: u64, a: u64, b: u64) -> u64 {
    derive(derive(base, a), b)
}
