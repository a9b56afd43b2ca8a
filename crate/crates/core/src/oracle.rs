//! Exact dyadic-rational arithmetic used as ground truth.
//!
//! A [`Dyadic`] is `m * 2^e` with an unbounded integer `m`. Sums, differences
//! and products of binary floating-point values are always dyadic, so every
//! single `+`, `-`, `*` performed by an arithmetic model can be checked without
//! any rounding on the reference side. Quotients are not closed in this set;
//! [`round_quotient`] produces correctly rounded quotients at a requested width
//! and [`error_ulps_quotient`] measures errors against an exact rational.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::fpmodel::{FpFormat, Rounding};

/// Exact value `mantissa * 2^exponent`.
///
/// Canonical form: the mantissa is odd, or zero with exponent zero. Two
/// canonical values are equal iff they denote the same number, so the derived
/// `PartialEq`/`Hash` are value equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

impl Dyadic {
    pub fn new(mantissa: impl Into<BigInt>, exponent: i64) -> Self {
        let mut mantissa = mantissa.into();
        match mantissa.trailing_zeros() {
            None => Self::zero(),
            Some(0) => Self { mantissa, exponent },
            Some(tz) => {
                mantissa >>= tz;
                Self {
                    mantissa,
                    exponent: exponent + tz as i64,
                }
            }
        }
    }

    pub fn zero() -> Self {
        Self {
            mantissa: BigInt::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> Self {
        Self::pow2(0)
    }

    pub fn pow2(exponent: i64) -> Self {
        Self {
            mantissa: BigInt::one(),
            exponent,
        }
    }

    pub fn from_int(value: i64) -> Self {
        Self::new(value, 0)
    }

    /// Exact value of a finite `f32`. Panics on NaN or infinity.
    pub fn from_f32(x: f32) -> Self {
        assert!(x.is_finite(), "non-finite f32 has no dyadic value");
        let bits = x.to_bits();
        let biased = ((bits >> 23) & 0xff) as i64;
        let frac = (bits & 0x7f_ffff) as i64;
        let (m, e) = if biased == 0 {
            (frac, -149)
        } else {
            (frac | 0x80_0000, biased - 150)
        };
        let m = if bits >> 31 == 1 { -m } else { m };
        Self::new(m, e)
    }

    /// Exact value of a finite `f64`. Panics on NaN or infinity.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite f64 has no dyadic value");
        let bits = x.to_bits();
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = (bits & 0xf_ffff_ffff_ffff) as i64;
        let (m, e) = if biased == 0 {
            (frac, -1074)
        } else {
            (frac | (1 << 52), biased - 1075)
        };
        let m = if bits >> 63 == 1 { -m } else { m };
        Self::new(m, e)
    }

    /// Odd (or zero) signed integer part of the canonical form.
    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    /// Binary exponent of the canonical form (`value = mantissa * 2^exponent`).
    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    /// Magnitude of the canonical mantissa.
    pub fn significand(&self) -> BigUint {
        self.mantissa.magnitude().clone()
    }

    pub fn signum(&self) -> i32 {
        match self.mantissa.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn abs(&self) -> Self {
        Self {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
        }
    }

    /// Number of significant bits (zero for zero).
    pub fn significant_bits(&self) -> u64 {
        self.mantissa.bits()
    }

    /// `floor(log2 |x|)`, or `None` for zero.
    pub fn msb_exponent(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.exponent + self.mantissa.bits() as i64 - 1)
        }
    }

    /// Multiplies by `2^k` exactly.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self {
            mantissa: self.mantissa.clone(),
            exponent: self.exponent + k,
        }
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exponent >= 0 {
            BigRational::from_integer(&self.mantissa << self.exponent as u64)
        } else {
            // odd numerator over a power of two is already reduced
            BigRational::new_raw(
                self.mantissa.clone(),
                BigInt::one() << (-self.exponent) as u64,
            )
        }
    }

    /// `log2 |x|` as a double; `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.mantissa.bits();
        let mag = self.mantissa.magnitude();
        let (top, dropped) = if bits > 64 {
            ((mag >> (bits - 64)).to_u64().unwrap(), bits - 64)
        } else {
            (mag.to_u64().unwrap(), 0)
        };
        (top as f64).log2() + dropped as f64 + self.exponent as f64
    }

    /// Nearest double (ties away from the exact value are irrelevant here;
    /// this is for display and coarse comparisons only).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mantissa.bits();
        let mag = self.mantissa.magnitude();
        let (top, dropped) = if bits > 64 {
            ((mag >> (bits - 64)).to_u64().unwrap(), bits - 64)
        } else {
            (mag.to_u64().unwrap(), 0)
        };
        let scale = self.exponent + dropped as i64;
        let v = top as f64 * 2f64.powi(scale.clamp(-1100, 1100) as i32);
        if self.is_negative() {
            -v
        } else {
            v
        }
    }

    /// Rounds to `bits` significant bits (no exponent range).
    pub fn round_to_bits(&self, bits: u32, rounding: Rounding) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let n = self.mantissa.bits();
        if n <= bits as u64 {
            return self.clone();
        }
        let drop = n - bits as u64;
        let mag = self.mantissa.magnitude();
        let kept = round_magnitude(mag >> drop, low_bits(mag, drop), drop, false, rounding);
        let kept = BigInt::from_biguint(self.mantissa.sign(), kept);
        Self::new(kept, self.exponent + drop as i64)
    }

    /// Normalized hexadecimal float text, e.g. `0x1.8p-1`, `-0x1p+3`, `0x0p+0`.
    pub fn to_hex(&self) -> String {
        if self.is_zero() {
            return "0x0p+0".to_string();
        }
        let sign = if self.is_negative() { "-" } else { "" };
        let mag = self.mantissa.magnitude();
        let n = mag.bits();
        let exp = self.exponent + n as i64 - 1;
        let frac_bits = n - 1;
        if frac_bits == 0 {
            return format!("{sign}0x1p{exp:+}");
        }
        let pad = (4 - frac_bits % 4) % 4;
        let frac = (mag - (BigUint::one() << frac_bits)) << pad;
        let digits = ((frac_bits + pad) / 4) as usize;
        format!(
            "{sign}0x1.{:0>width$}p{exp:+}",
            frac.to_str_radix(16),
            width = digits
        )
    }
}

/// Bits of `mag` strictly below position `drop`.
fn low_bits(mag: &BigUint, drop: u64) -> BigUint {
    mag & ((BigUint::one() << drop) - BigUint::one())
}

/// Rounds `kept + rem / 2^drop` (plus an optional sticky remainder below
/// `rem`) to an integer.
fn round_magnitude(
    kept: BigUint,
    rem: BigUint,
    drop: u64,
    sticky: bool,
    rounding: Rounding,
) -> BigUint {
    match rounding {
        Rounding::TowardZero => kept,
        Rounding::NearestEven => {
            if drop == 0 {
                return kept;
            }
            let half = BigUint::one() << (drop - 1);
            let up = match rem.cmp(&half) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => sticky || kept.is_odd(),
            };
            if up {
                kept + 1u32
            } else {
                kept
            }
        }
    }
}

impl Default for Dyadic {
    fn default() -> Self {
        Self::zero()
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dyadic({})", self.to_hex())
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    /// Parses hexadecimal float text such as `0x1.8p-1`, `-0x3p+2` or `0x0p+0`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("malformed hex float `{s}`"));
        let t = s.trim();
        let (negative, t) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let t = t
            .strip_prefix("0x")
            .or_else(|| t.strip_prefix("0X"))
            .ok_or_else(bad)?;
        let (digits, exp) = t.split_once(['p', 'P']).ok_or_else(bad)?;
        let exp: i64 = exp.parse().map_err(|_| bad())?;
        let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        let all: String = format!("{int_part}{frac_part}");
        let m = BigInt::parse_bytes(all.as_bytes(), 16).ok_or_else(bad)?;
        let m = if negative { -m } else { m };
        Ok(Self::new(m, exp - 4 * frac_part.len() as i64))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        // same sign: compare magnitudes by aligning exponents
        let e = self.exponent.min(other.exponent);
        let a = self.mantissa.magnitude() << (self.exponent - e) as u64;
        let b = other.mantissa.magnitude() << (other.exponent - e) as u64;
        let mag = a.cmp(&b);
        if sa > 0 {
            mag
        } else {
            mag.reverse()
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -self.clone()
    }
}

fn aligned_sum(a: &Dyadic, b: &Dyadic, negate_b: bool) -> Dyadic {
    if b.is_zero() {
        return a.clone();
    }
    if a.is_zero() {
        return if negate_b { -b } else { b.clone() };
    }
    let e = a.exponent.min(b.exponent);
    let ma = &a.mantissa << (a.exponent - e) as u64;
    let mb = &b.mantissa << (b.exponent - e) as u64;
    let m = if negate_b { ma - mb } else { ma + mb };
    Dyadic::new(m, e)
}

impl Add<&Dyadic> for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        aligned_sum(self, rhs, false)
    }
}

impl Sub<&Dyadic> for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        aligned_sum(self, rhs, true)
    }
}

impl Mul<&Dyadic> for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() || rhs.is_zero() {
            return Dyadic::zero();
        }
        // product of odd mantissas is odd: already canonical
        Dyadic {
            mantissa: &self.mantissa * &rhs.mantissa,
            exponent: self.exponent + rhs.exponent,
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: Dyadic) -> Dyadic { (&self).$m(&rhs) }
        }
        impl $tr<&Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: &Dyadic) -> Dyadic { (&self).$m(rhs) }
        }
        impl $tr<Dyadic> for &Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: Dyadic) -> Dyadic { self.$m(&rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

pub fn dy_add(a: &Dyadic, b: &Dyadic) -> Dyadic {
    a + b
}

pub fn dy_sub(a: &Dyadic, b: &Dyadic) -> Dyadic {
    a - b
}

pub fn dy_mul(a: &Dyadic, b: &Dyadic) -> Dyadic {
    a * b
}

/// `a / b` rounded to `bits` significant bits, decided from the exact
/// integer remainder.
pub fn round_quotient(a: &Dyadic, b: &Dyadic, bits: u32, rounding: Rounding) -> Result<Dyadic> {
    if b.is_zero() {
        return Err(Error::DivideByZero);
    }
    if bits < 2 {
        return Err(Error::InvalidArgument(format!(
            "quotient width must be at least 2 bits, got {bits}"
        )));
    }
    if a.is_zero() {
        return Ok(Dyadic::zero());
    }
    let negative = a.is_negative() != b.is_negative();
    let ma = a.mantissa.magnitude();
    let mb = b.mantissa.magnitude();
    // scale so the integer quotient has at least bits + 1 bits
    let k = bits as i64 + 1 + mb.bits() as i64 - ma.bits() as i64;
    let (num, den) = if k >= 0 {
        (ma << k as u64, mb.clone())
    } else {
        (ma.clone(), mb << (-k) as u64)
    };
    let (q, r) = num.div_rem(&den);
    let drop = q.bits() - bits as u64;
    let rem = low_bits(&q, drop);
    let kept = round_magnitude(&q >> drop, rem, drop, !r.is_zero(), rounding);
    let sign = if negative { Sign::Minus } else { Sign::Plus };
    Ok(Dyadic::new(
        BigInt::from_biguint(sign, kept),
        a.exponent - b.exponent - k + drop as i64,
    ))
}

/// Exponent of the ulp of a value of magnitude `x` in `fmt`; zero uses the
/// smallest normal binade.
pub(crate) fn ulp_exponent(x: &Dyadic, fmt: &FpFormat) -> i64 {
    let e = x
        .msb_exponent()
        .unwrap_or(fmt.emin as i64)
        .max(fmt.emin as i64);
    e - fmt.precision as i64 + 1
}

/// `(computed - exact) / ulp(computed)` as an exact rational.
pub fn error_ulps(computed: &Dyadic, exact: &Dyadic, fmt: &FpFormat) -> Result<BigRational> {
    if computed.is_zero() && exact.is_zero() {
        return Err(Error::BothZero);
    }
    let diff = computed - exact;
    Ok(diff.mul_pow2(-ulp_exponent(computed, fmt)).to_rational())
}

/// Error in ulps of `computed` against the exact rational `num / den`.
pub fn error_ulps_quotient(
    computed: &Dyadic,
    num: &Dyadic,
    den: &Dyadic,
    fmt: &FpFormat,
) -> Result<BigRational> {
    if den.is_zero() {
        return Err(Error::DivideByZero);
    }
    if computed.is_zero() && num.is_zero() {
        return Err(Error::BothZero);
    }
    // (c - n/d) / u = (c*d - n) / (d*u)
    let scaled = (computed * den) - num;
    let denom = den.mul_pow2(ulp_exponent(computed, fmt));
    Ok(scaled.to_rational() / denom.to_rational())
}

/// `log2(|computed - exact| / |exact|)`; `-inf` when the two are equal.
pub fn error_bits(computed: &Dyadic, exact: &Dyadic) -> Result<f64> {
    if exact.is_zero() {
        return Err(Error::ExactIsZero);
    }
    let diff = computed - exact;
    if diff.is_zero() {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(diff.log2_abs() - exact.log2_abs())
}

/// One-decimal rendering used in accuracy tables; exact results print as `(exact)`.
pub fn format_error_bits(bits: f64) -> String {
    if bits == f64::NEG_INFINITY {
        "(exact)".to_string()
    } else {
        format!("{bits:.1}")
    }
}

/// Exact `num/den` text for a rational.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Nearest double to a rational, for decimal display.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    let n = Dyadic::new(r.numer().clone(), 0);
    let d = Dyadic::new(r.denom().clone(), 0);
    if n.is_zero() {
        return 0.0;
    }
    match round_quotient(&n, &d, 60, Rounding::NearestEven) {
        Ok(q) => q.to_f64(),
        Err(_) => f64::NAN,
    }
}
