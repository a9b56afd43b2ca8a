use std::cmp::Ordering;
use std::fmt::{self, Debug};

use super::format::FpFormat;
use super::sim::{self, SimFloat};
use crate::error::{Error, Result};
use crate::oracle::Dyadic;

/// Uniform arithmetic interface over host `f32` and simulated formats.
///
/// `add`, `sub`, `mul` and `div` may round; `neg` and `abs` are exact.
/// Results that leave the finite range are errors, never values.
pub trait Backend: Sync + Send {
    type Value: Copy + PartialEq + Debug + Send + Sync;

    fn format(&self) -> &FpFormat;
    fn name(&self) -> String;

    fn add(&self, a: Self::Value, b: Self::Value) -> Result<Self::Value>;
    fn sub(&self, a: Self::Value, b: Self::Value) -> Result<Self::Value>;
    fn mul(&self, a: Self::Value, b: Self::Value) -> Result<Self::Value>;
    fn div(&self, a: Self::Value, b: Self::Value) -> Result<Self::Value>;

    fn neg(&self, a: Self::Value) -> Self::Value;
    fn abs(&self, a: Self::Value) -> Self::Value;
    fn cmp_abs(&self, a: Self::Value, b: Self::Value) -> Ordering;

    fn zero(&self) -> Self::Value;
    fn is_zero(&self, a: Self::Value) -> bool;
    fn is_subnormal(&self, a: Self::Value) -> bool;
    /// Normalized exponent (`floor(log2 |a|)`), `None` for zero.
    fn exponent(&self, a: Self::Value) -> Option<i32>;

    fn to_dyadic(&self, a: Self::Value) -> Dyadic;
    /// Rounds an exact value into the backend's format.
    #[allow(clippy::wrong_self_convention)]
    fn from_dyadic(&self, x: &Dyadic) -> Result<Self::Value>;
    /// `2^k`, rounded into the format.
    fn pow2(&self, k: i32) -> Result<Self::Value>;
    /// `±mag * 2^scale`, rounded into the format.
    #[allow(clippy::wrong_self_convention)]
    fn from_parts(&self, negative: bool, mag: u64, scale: i32) -> Result<Self::Value>;

    fn ulp(&self, a: Self::Value) -> Result<Dyadic> {
        let e = self.exponent(a).ok_or(Error::ZeroArgument)?;
        let f = self.format();
        Ok(Dyadic::pow2(e.max(f.emin) as i64 - f.precision as i64 + 1))
    }
}

/// Host single-precision arithmetic.
#[derive(Debug, Clone, Copy, Default)]
pub struct Native {
    format: FpFormat,
}

impl Native {
    pub fn new() -> Self {
        Self {
            format: FpFormat::binary32(),
        }
    }
}

fn finite(x: f32) -> Result<f32> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Overflow)
    }
}

impl Backend for Native {
    type Value = f32;

    fn format(&self) -> &FpFormat {
        &self.format
    }

    fn name(&self) -> String {
        "native".to_string()
    }

    #[inline]
    fn add(&self, a: f32, b: f32) -> Result<f32> {
        finite(a + b)
    }

    #[inline]
    fn sub(&self, a: f32, b: f32) -> Result<f32> {
        finite(a - b)
    }

    #[inline]
    fn mul(&self, a: f32, b: f32) -> Result<f32> {
        finite(a * b)
    }

    #[inline]
    fn div(&self, a: f32, b: f32) -> Result<f32> {
        if b == 0.0 {
            return Err(Error::DivideByZero);
        }
        finite(a / b)
    }

    #[inline]
    fn neg(&self, a: f32) -> f32 {
        -a
    }

    #[inline]
    fn abs(&self, a: f32) -> f32 {
        a.abs()
    }

    #[inline]
    fn cmp_abs(&self, a: f32, b: f32) -> Ordering {
        a.abs().total_cmp(&b.abs())
    }

    fn zero(&self) -> f32 {
        0.0
    }

    fn is_zero(&self, a: f32) -> bool {
        a == 0.0
    }

    fn is_subnormal(&self, a: f32) -> bool {
        a.is_subnormal()
    }

    fn exponent(&self, a: f32) -> Option<i32> {
        if a == 0.0 {
            return None;
        }
        let biased = ((a.to_bits() >> 23) & 0xff) as i32;
        if biased == 0 {
            let frac = a.to_bits() & 0x7f_ffff;
            Some(-127 - (frac.leading_zeros() as i32 - 9))
        } else {
            Some(biased - 127)
        }
    }

    fn to_dyadic(&self, a: f32) -> Dyadic {
        Dyadic::from_f32(a)
    }

    fn from_dyadic(&self, x: &Dyadic) -> Result<f32> {
        Ok(sim::round(x, &self.format)?.to_f32())
    }

    fn from_parts(&self, negative: bool, mag: u64, scale: i32) -> Result<f32> {
        Ok(sim::from_parts(negative, mag as u128, scale, &self.format)?.to_f32())
    }

    #[inline]
    fn pow2(&self, k: i32) -> Result<f32> {
        if (-126..=127).contains(&k) {
            Ok(f32::from_bits(((k + 127) as u32) << 23))
        } else {
            self.from_dyadic(&Dyadic::pow2(k as i64))
        }
    }
}

/// Software arithmetic in an arbitrary [`FpFormat`].
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct Sim {
    format: FpFormat,
}

impl Sim {
    pub fn new(format: FpFormat) -> Self {
        Self { format }
    }

    pub fn value(&self, x: f64) -> Result<SimFloat> {
        sim::round(&Dyadic::from_f64(x), &self.format)
    }
}

impl Debug for Sim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sim({})", self.format)
    }
}

impl Backend for Sim {
    type Value = SimFloat;

    fn format(&self) -> &FpFormat {
        &self.format
    }

    fn name(&self) -> String {
        format!("sim[{}]", self.format)
    }

    fn add(&self, a: SimFloat, b: SimFloat) -> Result<SimFloat> {
        sim::add(a, b, &self.format)
    }

    fn sub(&self, a: SimFloat, b: SimFloat) -> Result<SimFloat> {
        sim::sub(a, b, &self.format)
    }

    fn mul(&self, a: SimFloat, b: SimFloat) -> Result<SimFloat> {
        sim::mul(a, b, &self.format)
    }

    fn div(&self, a: SimFloat, b: SimFloat) -> Result<SimFloat> {
        sim::div(a, b, &self.format)
    }

    fn neg(&self, a: SimFloat) -> SimFloat {
        -a
    }

    fn abs(&self, a: SimFloat) -> SimFloat {
        a.abs()
    }

    fn cmp_abs(&self, a: SimFloat, b: SimFloat) -> Ordering {
        a.cmp_abs(&b)
    }

    fn zero(&self) -> SimFloat {
        SimFloat::ZERO
    }

    fn is_zero(&self, a: SimFloat) -> bool {
        a.is_zero()
    }

    fn is_subnormal(&self, a: SimFloat) -> bool {
        a.is_subnormal()
    }

    fn exponent(&self, a: SimFloat) -> Option<i32> {
        if a.is_zero() {
            None
        } else if a.is_subnormal() {
            Some(
                a.exponent()
                    - (a.significand().leading_zeros() as i32
                        - (64 - self.format.precision as i32)),
            )
        } else {
            Some(a.exponent())
        }
    }

    fn to_dyadic(&self, a: SimFloat) -> Dyadic {
        a.to_dyadic()
    }

    fn from_dyadic(&self, x: &Dyadic) -> Result<SimFloat> {
        sim::round(x, &self.format)
    }

    fn pow2(&self, k: i32) -> Result<SimFloat> {
        sim::from_parts(false, 1, k, &self.format)
    }

    fn from_parts(&self, negative: bool, mag: u64, scale: i32) -> Result<SimFloat> {
        sim::from_parts(negative, mag as u128, scale, &self.format)
    }

    fn ulp(&self, a: SimFloat) -> Result<Dyadic> {
        sim::ulp(a, &self.format)
    }
}

pub fn native_backend() -> Native {
    Native::new()
}

pub fn sim_backend(format: FpFormat) -> Sim {
    Sim::new(format)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn native_delegates_to_host() {
        let n = native_backend();
        assert_eq!(n.add(1.0, 2.0).unwrap(), 3.0);
        assert_eq!(n.mul(f32::MAX, 2.0), Err(Error::Overflow));
        assert_eq!(n.div(1.0, 0.0), Err(Error::DivideByZero));
        assert_eq!(n.exponent(1.0), Some(0));
        assert_eq!(n.exponent(0.75), Some(-1));
        assert_eq!(n.exponent(f32::from_bits(1)), Some(-149));
        assert_eq!(n.ulp(1.0).unwrap(), Dyadic::pow2(-23));
        assert_eq!(n.ulp(f32::from_bits(3)).unwrap(), Dyadic::pow2(-149));
        assert_eq!(n.from_dyadic(&Dyadic::from_f64(0.1)).unwrap(), 0.1f32);
    }

    #[test]
    fn sim_exponent_of_subnormal() {
        let s = sim_backend(FpFormat::binary32());
        let v = s.from_dyadic(&Dyadic::pow2(-140)).unwrap();
        assert_eq!(s.exponent(v), Some(-140));
        assert_eq!(s.ulp(v).unwrap(), Dyadic::pow2(-149));
    }
}
