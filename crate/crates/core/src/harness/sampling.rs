//! Deterministic random operands.
//!
//! Every sample index owns its own ChaCha8 stream (`stream = index`), so a
//! sample's operands depend only on `(seed, index)`. Work can be split across
//! threads in any way and still reproduce the sequential run exactly.

use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::fpmodel::{Backend, FpFormat};

/// Seed used when neither `--seed` nor the environment provides one.
pub const DEFAULT_SEED: u64 = 0x5eed_f10a_7f10_a700;

/// Environment variable overriding [`DEFAULT_SEED`].
pub const SEED_ENV: &str = "FLOATFLOAT_SEED";

/// Generator for sample `index` of the run seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform random `p`-bit significand with the leading bit set.
pub fn random_significand<R: Rng>(rng: &mut R, precision: u32) -> u64 {
    let low = (1u64 << (precision - 1)) - 1;
    (1u64 << (precision - 1)) | (rng.random::<u64>() & low)
}

/// Random normal value `±m * 2^e` with uniform significand and `e` uniform in
/// `exponents`.
pub fn random_normal<B: Backend, R: Rng>(
    backend: &B,
    rng: &mut R,
    exponents: RangeInclusive<i32>,
    allow_negative: bool,
) -> Result<B::Value> {
    let p = backend.format().precision;
    let m = random_significand(rng, p);
    let e = rng.random_range(exponents);
    let negative = allow_negative && rng.random::<bool>();
    backend.from_parts(negative, m, e - p as i32 + 1)
}

/// Value just below a power of two: the top `p - k` significand bits are set
/// and the low `k <= 4` bits are random. Sums with such a value tend to carry
/// into the next binade, the pattern that exposes a missing guard digit.
pub fn random_all_ones<B: Backend, R: Rng>(
    backend: &B,
    rng: &mut R,
    exponent: i32,
) -> Result<B::Value> {
    let p = backend.format().precision;
    let k = rng.random_range(0..=4.min(p - 1));
    let m = ((1u64 << p) - 1) ^ (rng.random::<u64>() & ((1u64 << k) - 1));
    let negative = rng.random::<bool>();
    backend.from_parts(negative, m, exponent - p as i32 + 1)
}

/// Pair `(x, y)` in random order where one is uniform in `exponents` and the
/// other is [`random_all_ones`] at most 3 binades below it.
pub fn random_close_pair<B: Backend, R: Rng>(
    backend: &B,
    rng: &mut R,
    exponents: RangeInclusive<i32>,
) -> Result<(B::Value, B::Value)> {
    let lowest = *exponents.start();
    let a = random_normal(backend, rng, exponents, true)?;
    let e = backend.exponent(a).unwrap_or(lowest);
    let gap = rng.random_range(0..=3);
    let b = random_all_ones(backend, rng, (e - gap).max(lowest))?;
    Ok(if rng.random() { (a, b) } else { (b, a) })
}

/// Symmetric exponent window `[-r, r]` with
/// `r = min(60, emax / 2 - 3, -emin / 2 - 3)`; `[-60, 60]` for binary32.
pub fn accuracy_exponents(fmt: &FpFormat) -> RangeInclusive<i32> {
    let r = 60.min(fmt.emax / 2 - 3).min(-fmt.emin / 2 - 3).max(1);
    -r..=r
}

/// Narrower window for rounding probes so quotients and products stay far
/// from the range limits.
pub fn probe_exponents(fmt: &FpFormat) -> RangeInclusive<i32> {
    let span = fmt.emax.min(-fmt.emin);
    let r = 20.min((span - 2) / 4).max(1);
    -r..=r
}
