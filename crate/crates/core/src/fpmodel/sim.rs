//! Bit-exact software arithmetic over an [`FpFormat`].
//!
//! Every operation forms its exact (or, for guard-limited sums, its
//! truncated-then-exact) result as an integer magnitude with a binary scale,
//! then rounds once through [`round_parts`]. Significands never exceed 53 bits,
//! so all exact intermediates fit in a `u128`.

use std::cmp::Ordering;
use std::fmt;

use num_traits::ToPrimitive;

use super::format::{FpFormat, GuardDigits, Rounding};
use crate::error::{Error, Result};
use crate::oracle::Dyadic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Class {
    Zero,
    Normal,
    Subnormal,
}

/// A value of some [`FpFormat`]: `±significand * 2^(exponent - p + 1)`.
///
/// Normal values have the top (`p - 1`) significand bit set. Subnormals carry
/// `exponent = emin` and a shorter significand. Zero is unsigned.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SimFloat {
    negative: bool,
    significand: u64,
    exponent: i32,
    precision: u8,
    class: Class,
}

impl SimFloat {
    pub const ZERO: SimFloat = SimFloat {
        negative: false,
        significand: 0,
        exponent: 0,
        precision: 0,
        class: Class::Zero,
    };

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn significand(&self) -> u64 {
        self.significand
    }

    /// Normalized exponent (`emin` for subnormals, 0 for zero).
    pub fn exponent(&self) -> i32 {
        self.exponent
    }

    pub fn class(&self) -> Class {
        self.class
    }

    pub fn is_zero(&self) -> bool {
        self.class == Class::Zero
    }

    pub fn is_subnormal(&self) -> bool {
        self.class == Class::Subnormal
    }

    /// Exponent of the significand's least significant bit.
    fn lsb(&self) -> i32 {
        self.exponent - self.precision as i32 + 1
    }

    pub fn to_dyadic(&self) -> Dyadic {
        if self.is_zero() {
            return Dyadic::zero();
        }
        let m = self.significand as i64;
        Dyadic::new(if self.negative { -m } else { m }, self.lsb() as i64)
    }

    pub fn abs(self) -> SimFloat {
        SimFloat {
            negative: false,
            ..self
        }
    }

    /// Compares magnitudes.
    pub fn cmp_abs(&self, other: &SimFloat) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            _ => self
                .exponent
                .cmp(&other.exponent)
                .then(self.significand.cmp(&other.significand)),
        }
    }

    /// Value as a double; exact whenever the format fits in binary64.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let mut v = self.significand as f64;
        let mut e = self.lsb();
        while e != 0 {
            let step = e.clamp(-1000, 1000);
            v *= f64::from_bits(((step + 1023) as u64) << 52);
            e -= step;
        }
        if self.negative {
            -v
        } else {
            v
        }
    }

    /// Value as a single; exact for binary32-compatible formats.
    pub fn to_f32(&self) -> f32 {
        self.to_f64() as f32
    }
}

impl std::ops::Neg for SimFloat {
    type Output = SimFloat;

    fn neg(self) -> SimFloat {
        if self.is_zero() {
            self
        } else {
            SimFloat {
                negative: !self.negative,
                ..self
            }
        }
    }
}

impl fmt::Debug for SimFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SimFloat({})", self.to_dyadic().to_hex())
    }
}

impl fmt::Display for SimFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_dyadic().to_hex())
    }
}

/// Rounds the exact magnitude `mag * 2^lsb` into `fmt`.
///
/// `sticky` marks a true value strictly above `mag * 2^lsb` by less than
/// `2^lsb`; callers only set it when `mag >= 2^(p + 1)`, which guarantees at
/// least one bit is dropped.
fn round_parts(
    negative: bool,
    mag: u128,
    lsb: i32,
    sticky: bool,
    fmt: &FpFormat,
) -> Result<SimFloat> {
    if mag == 0 {
        debug_assert!(!sticky);
        return Ok(SimFloat::ZERO);
    }
    let p = fmt.precision as i32;
    let nbits = 128 - mag.leading_zeros() as i32;
    let top = lsb + nbits - 1;
    let mut target = (top - p + 1).max(fmt.emin - p + 1);
    let shift = target - lsb;
    let mut sig = if shift <= 0 {
        debug_assert!(!sticky, "sticky bit below the rounding position");
        mag << (-shift)
    } else {
        let (kept, vs_half) = if shift > 128 {
            (0, Ordering::Less)
        } else if shift == 128 {
            (0, mag.cmp(&(1u128 << 127)))
        } else {
            let rem = mag & ((1u128 << shift) - 1);
            (mag >> shift, rem.cmp(&(1u128 << (shift - 1))))
        };
        let vs_half = if vs_half == Ordering::Equal && sticky {
            Ordering::Greater
        } else {
            vs_half
        };
        let up = match fmt.rounding {
            Rounding::TowardZero => false,
            Rounding::NearestEven => {
                vs_half == Ordering::Greater || (vs_half == Ordering::Equal && kept & 1 == 1)
            }
        };
        kept + u128::from(up)
    };
    if sig == 0 {
        return Ok(SimFloat::ZERO);
    }
    if sig == 1u128 << p {
        sig >>= 1;
        target += 1;
    }
    let sig_bits = 128 - sig.leading_zeros() as i32;
    let exponent = target + sig_bits - 1;
    if exponent > fmt.emax {
        return Err(Error::Overflow);
    }
    if sig_bits < p {
        if fmt.flush_subnormals {
            return Ok(SimFloat::ZERO);
        }
        return Ok(SimFloat {
            negative,
            significand: sig as u64,
            exponent: fmt.emin,
            precision: p as u8,
            class: Class::Subnormal,
        });
    }
    Ok(SimFloat {
        negative,
        significand: sig as u64,
        exponent,
        precision: p as u8,
        class: Class::Normal,
    })
}

/// Rounds the exact value `±mag * 2^lsb` into `fmt`.
pub fn from_parts(negative: bool, mag: u128, lsb: i32, fmt: &FpFormat) -> Result<SimFloat> {
    round_parts(negative, mag, lsb, false, fmt)
}

/// Treats subnormal operands as zero on flush-to-zero formats.
fn operand(x: SimFloat, fmt: &FpFormat) -> SimFloat {
    if fmt.flush_subnormals && x.is_subnormal() {
        SimFloat::ZERO
    } else {
        x
    }
}

/// Rounds an exact value into `fmt`.
pub fn round(x: &Dyadic, fmt: &FpFormat) -> Result<SimFloat> {
    let Some(msb) = x.msb_exponent() else {
        return Ok(SimFloat::ZERO);
    };
    let p = fmt.precision as i64;
    if msb > fmt.emax as i64 + 1 {
        return Err(Error::Overflow);
    }
    if msb < fmt.emin as i64 - p - 1 {
        // below half the smallest subnormal under either rounding
        return Ok(SimFloat::ZERO);
    }
    const KEEP: u64 = 120;
    let mag = x.significand();
    let nbits = mag.bits();
    let (mag, lsb, sticky) = if nbits <= KEEP {
        (mag.to_u128().unwrap(), x.exponent(), false)
    } else {
        // an odd mantissa always has nonzero dropped bits
        let drop = nbits - KEEP;
        (
            (mag >> drop).to_u128().unwrap(),
            x.exponent() + drop as i64,
            true,
        )
    };
    round_parts(x.is_negative(), mag, lsb as i32, sticky, fmt)
}

fn add_signed(a: SimFloat, b: SimFloat, fmt: &FpFormat) -> Result<SimFloat> {
    let a = operand(a, fmt);
    let b = operand(b, fmt);
    if b.is_zero() {
        return Ok(a);
    }
    if a.is_zero() {
        return Ok(b);
    }
    let (big, small) = if a.exponent >= b.exponent {
        (a, b)
    } else {
        (b, a)
    };
    let d = (big.exponent - small.exponent) as u32;
    let same_sign = big.negative == small.negative;
    let combine = |big_mag: u128, small_mag: u128| -> (bool, u128) {
        if same_sign {
            (big.negative, big_mag + small_mag)
        } else if big_mag >= small_mag {
            (big.negative, big_mag - small_mag)
        } else {
            (small.negative, small_mag - big_mag)
        }
    };
    let (big_sig, small_sig) = (big.significand as u128, small.significand as u128);
    match fmt.guard_digits {
        GuardDigits::Zero | GuardDigits::One => {
            let g = u32::from(fmt.guard_digits == GuardDigits::One);
            let small_aligned = if d <= g {
                small_sig << (g - d)
            } else if d - g >= 64 {
                0
            } else {
                small_sig >> (d - g)
            };
            let (neg, mag) = combine(big_sig << g, small_aligned);
            round_parts(neg, mag, big.lsb() - g as i32, false, fmt)
        }
        GuardDigits::Unbounded if d <= 72 => {
            let (neg, mag) = combine(big_sig << d, small_sig);
            round_parts(neg, mag, small.lsb(), false, fmt)
        }
        GuardDigits::Unbounded => {
            // the small operand lies far below the rounding position: only
            // its sign matters, carried as a sticky remainder
            let scaled = big_sig << 3;
            let mag = if same_sign { scaled } else { scaled - 1 };
            round_parts(big.negative, mag, big.lsb() - 3, true, fmt)
        }
    }
}

pub fn add(a: SimFloat, b: SimFloat, fmt: &FpFormat) -> Result<SimFloat> {
    add_signed(a, b, fmt)
}

pub fn sub(a: SimFloat, b: SimFloat, fmt: &FpFormat) -> Result<SimFloat> {
    add_signed(a, -b, fmt)
}

/// Exact `2p`-bit product, rounded once.
pub fn mul(a: SimFloat, b: SimFloat, fmt: &FpFormat) -> Result<SimFloat> {
    let a = operand(a, fmt);
    let b = operand(b, fmt);
    if a.is_zero() || b.is_zero() {
        return Ok(SimFloat::ZERO);
    }
    let mag = a.significand as u128 * b.significand as u128;
    round_parts(a.negative != b.negative, mag, a.lsb() + b.lsb(), false, fmt)
}

/// Correctly rounded `1 / b`.
pub fn reciprocal(b: SimFloat, fmt: &FpFormat) -> Result<SimFloat> {
    let b = operand(b, fmt);
    if b.is_zero() {
        return Err(Error::DivideByZero);
    }
    let k = 2 * fmt.precision as i32 + 3;
    let num = 1u128 << k;
    let den = b.significand as u128;
    let (q, r) = (num / den, num % den);
    round_parts(b.negative, q, -k - b.lsb(), r != 0, fmt)
}

/// Division as reciprocal-then-multiply: two roundings.
pub fn div(a: SimFloat, b: SimFloat, fmt: &FpFormat) -> Result<SimFloat> {
    let recip = reciprocal(b, fmt)?;
    mul(a, recip, fmt)
}

/// `2^(e - p + 1)` for the normalized exponent `e` of `x`.
pub fn ulp(x: SimFloat, fmt: &FpFormat) -> Result<Dyadic> {
    if x.is_zero() {
        return Err(Error::ZeroArgument);
    }
    Ok(Dyadic::pow2(x.exponent as i64 - fmt.precision as i64 + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::round_quotient;

    fn fmt3(guard: GuardDigits, rounding: Rounding) -> FpFormat {
        FpFormat::new(3, -10, 10, rounding, guard, false).unwrap()
    }

    fn sim(x: f64, fmt: &FpFormat) -> SimFloat {
        let v = round(&Dyadic::from_f64(x), fmt).unwrap();
        assert_eq!(v.to_dyadic(), Dyadic::from_f64(x), "{x} not representable");
        v
    }

    #[test]
    fn round_examples() {
        let x = Dyadic::one() + Dyadic::pow2(-24);
        let rne = FpFormat::binary32();
        let rz = rne.with_rounding(Rounding::TowardZero);
        assert_eq!(round(&x, &rne).unwrap().to_dyadic(), Dyadic::one());
        assert_eq!(round(&x, &rz).unwrap().to_dyadic(), Dyadic::one());
        // 1 + 3*2^-24 is a tie between odd and even neighbors: rounds up
        let y = Dyadic::one() + Dyadic::new(3, -24);
        assert_eq!(
            round(&y, &rne).unwrap().to_dyadic(),
            Dyadic::one() + Dyadic::pow2(-22)
        );
        assert_eq!(
            round(&y, &rz).unwrap().to_dyadic(),
            Dyadic::one() + Dyadic::pow2(-23)
        );
        for fmt in [
            rne,
            rz,
            FpFormat::chopped_without_guard(),
            fmt3(GuardDigits::Zero, Rounding::NearestEven),
        ] {
            assert!(round(&Dyadic::zero(), &fmt).unwrap().is_zero());
        }
    }

    #[test]
    fn round_overflow_and_underflow() {
        let fmt = FpFormat::binary32();
        assert_eq!(round(&Dyadic::pow2(128), &fmt), Err(Error::Overflow));
        // largest finite + half ulp rounds up past emax
        let max = Dyadic::from_f32(f32::MAX);
        let over = &max + &Dyadic::pow2(103);
        assert_eq!(round(&over, &fmt), Err(Error::Overflow));
        assert_eq!(
            round(&over, &fmt.with_rounding(Rounding::TowardZero))
                .unwrap()
                .to_dyadic(),
            max
        );
        // subnormals survive without flushing and vanish with it
        let tiny = Dyadic::pow2(-140);
        let kept = round(&tiny, &fmt).unwrap();
        assert!(kept.is_subnormal());
        assert_eq!(kept.to_dyadic(), tiny);
        assert!(round(&tiny, &fmt.with_flush(true)).unwrap().is_zero());
        // half the smallest subnormal ties to even (zero)
        assert!(round(&Dyadic::pow2(-150), &fmt).unwrap().is_zero());
        assert_eq!(
            round(&Dyadic::new(3, -151), &fmt).unwrap().to_dyadic(),
            Dyadic::pow2(-149)
        );
    }

    #[test]
    fn wide_inputs_use_sticky_bits() {
        let fmt = FpFormat::binary32();
        // 1 + 2^-24 + 2^-200: just above the tie, must round up
        let x = Dyadic::one() + Dyadic::pow2(-24) + Dyadic::pow2(-200);
        assert_eq!(
            round(&x, &fmt).unwrap().to_dyadic(),
            Dyadic::one() + Dyadic::pow2(-23)
        );
        let y = Dyadic::one() + Dyadic::pow2(-24) - Dyadic::pow2(-200);
        assert_eq!(round(&y, &fmt).unwrap().to_dyadic(), Dyadic::one());
    }

    #[test]
    fn add_identity() {
        let fmt = FpFormat::binary32();
        let one = sim(1.0, &fmt);
        assert_eq!(add(one, SimFloat::ZERO, &fmt).unwrap(), one);
        assert_eq!(add(SimFloat::ZERO, one, &fmt).unwrap(), one);
        assert!(sub(one, one, &fmt).unwrap().is_zero());
    }

    #[test]
    fn guard_digit_alignment() {
        let one = fmt3(GuardDigits::One, Rounding::TowardZero);
        let x = sim(1.25, &one);
        let y = sim(0.875, &one);
        assert_eq!(
            sub(x, y, &one).unwrap().to_dyadic(),
            Dyadic::from_f64(0.375)
        );
        let zero = fmt3(GuardDigits::Zero, Rounding::TowardZero);
        assert_eq!(sub(x, y, &zero).unwrap().to_dyadic(), Dyadic::from_f64(0.5));
        let zero_rne = fmt3(GuardDigits::Zero, Rounding::NearestEven);
        assert_eq!(
            sub(x, y, &zero_rne).unwrap().to_dyadic(),
            Dyadic::from_f64(0.5)
        );
    }

    #[test]
    fn far_apart_operands() {
        let rne = FpFormat::binary32();
        let rz = rne.with_rounding(Rounding::TowardZero);
        let one = sim(1.0, &rne);
        let tiny = sim(2f64.powi(-100), &rne);
        assert_eq!(add(one, tiny, &rne).unwrap(), one);
        assert_eq!(sub(one, tiny, &rne).unwrap(), one);
        assert_eq!(add(one, tiny, &rz).unwrap(), one);
        assert_eq!(
            sub(one, tiny, &rz).unwrap().to_dyadic(),
            Dyadic::one() - Dyadic::pow2(-24)
        );
    }

    #[test]
    fn mul_rounds_exact_product() {
        let fmt = FpFormat::binary32();
        let a = sim(4097.0, &fmt);
        assert_eq!(
            mul(a, a, &fmt).unwrap().to_dyadic(),
            Dyadic::from_int(16785408)
        );
        let max = sim(f32::MAX as f64, &fmt);
        assert_eq!(mul(max, sim(2.0, &fmt), &fmt), Err(Error::Overflow));
    }

    #[test]
    fn div_is_two_roundings() {
        let fmt = FpFormat::binary32();
        let one = sim(1.0, &fmt);
        for x in [1.0, 3.0, 0.1f32 as f64, 1e30f32 as f64] {
            let v = sim(x, &fmt);
            assert_eq!(div(v, one, &fmt).unwrap(), v);
        }
        let two = sim(2.0, &fmt);
        assert_eq!(div(two, two, &fmt).unwrap(), one);
        let three = sim(3.0, &fmt);
        let q = div(one, three, &fmt).unwrap();
        let correct = round_quotient(
            &Dyadic::one(),
            &Dyadic::from_int(3),
            24,
            Rounding::NearestEven,
        )
        .unwrap();
        let diff = (&q.to_dyadic() - &correct).abs();
        assert!(diff <= ulp(q, &fmt).unwrap());
        assert_eq!(div(one, SimFloat::ZERO, &fmt), Err(Error::DivideByZero));
    }

    #[test]
    fn reciprocal_is_correctly_rounded() {
        for rounding in [Rounding::NearestEven, Rounding::TowardZero] {
            let fmt = FpFormat::binary32().with_rounding(rounding);
            for m in (1u64..4000).chain((1 << 23)..(1 << 23) + 500) {
                let b = round(&Dyadic::from_int(m as i64), &fmt).unwrap();
                let got = reciprocal(b, &fmt).unwrap().to_dyadic();
                let want = round_quotient(&Dyadic::one(), &b.to_dyadic(), 24, rounding).unwrap();
                assert_eq!(got, want, "1/{m} {rounding:?}");
            }
        }
    }

    #[test]
    fn ulp_examples() {
        let fmt = FpFormat::binary32();
        assert_eq!(ulp(sim(1.0, &fmt), &fmt).unwrap(), Dyadic::pow2(-23));
        assert_eq!(ulp(sim(4097.0, &fmt), &fmt).unwrap(), Dyadic::pow2(-11));
        assert_eq!(ulp(sim(0.75, &fmt), &fmt).unwrap(), Dyadic::pow2(-24));
        assert_eq!(ulp(SimFloat::ZERO, &fmt), Err(Error::ZeroArgument));
        let sub = sim(2f64.powi(-140), &fmt);
        assert_eq!(ulp(sub, &fmt).unwrap(), Dyadic::pow2(-149));
    }

    #[test]
    fn canonical_encoding() {
        let fmt = FpFormat::binary32();
        let a = sim(1.5, &fmt);
        assert_eq!(a.significand(), 0xc0_0000);
        assert_eq!(a.exponent(), 0);
        assert_eq!(a.class(), Class::Normal);
        let b = round(&(Dyadic::from_int(3) * Dyadic::pow2(-1)), &fmt).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn flush_to_zero_on_operands_and_results() {
        let plain = FpFormat::binary32();
        let ftz = plain.with_flush(true);
        let min = sim(2f64.powi(-126), &plain);
        let half = sim(0.5, &plain);
        assert!(mul(min, half, &plain).unwrap().is_subnormal());
        assert!(mul(min, half, &ftz).unwrap().is_zero());
        let subn = round(&Dyadic::pow2(-130), &plain).unwrap();
        assert_eq!(add(min, subn, &ftz).unwrap(), min);
    }
}
