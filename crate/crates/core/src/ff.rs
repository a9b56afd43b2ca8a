//! The float-float number type and its Add22/Mul22 operators.

use std::fmt;

use crate::eft::{add12, mul12};
use crate::error::{Error, Result};
use crate::fpmodel::{native_backend, Backend};
use crate::oracle::Dyadic;

/// Unevaluated sum `hi + lo` of two backend values.
///
/// Normalized values satisfy `(hi, lo) == add12(hi, lo)`, so `|lo|` is at most
/// half an ulp of `hi` under round-to-nearest and `lo == 0` when `hi == 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloatFloat<V = f32> {
    pub hi: V,
    pub lo: V,
}

impl<V: Copy> FloatFloat<V> {
    /// Builds a pair as-is, without normalizing.
    pub const fn from_raw(hi: V, lo: V) -> Self {
        Self { hi, lo }
    }

    pub fn to_dyadic<B: Backend<Value = V>>(&self, backend: &B) -> Dyadic {
        backend.to_dyadic(self.hi) + backend.to_dyadic(self.lo)
    }

    pub fn is_normalized<B: Backend<Value = V>>(&self, backend: &B) -> bool
    where
        V: PartialEq,
    {
        matches!(add12(backend, self.hi, self.lo), Ok(p) if p.hi == self.hi && p.lo == self.lo)
    }
}

/// Normalizing constructor: returns `add12(h, l)`.
pub fn ff_from_parts<B: Backend>(
    backend: &B,
    h: B::Value,
    l: B::Value,
) -> Result<FloatFloat<B::Value>> {
    let p = add12(backend, h, l)?;
    Ok(FloatFloat::from_raw(p.hi, p.lo))
}

/// Float-float addition with the magnitude branch and a final renormalizing
/// two-sum.
///
/// The result satisfies `|rh + rl - (a + b)| <= max(2^-p |al + bl|,
/// 2^(4-2p) |a + b|)` for normalized round-to-nearest inputs.
pub fn add22<B: Backend>(
    backend: &B,
    a: FloatFloat<B::Value>,
    b: FloatFloat<B::Value>,
) -> Result<FloatFloat<B::Value>> {
    let r = backend.add(a.hi, b.hi)?;
    let s = if backend.cmp_abs(a.hi, b.hi).is_ge() {
        let t = backend.add(backend.sub(a.hi, r)?, b.hi)?;
        backend.add(backend.add(t, b.lo)?, a.lo)?
    } else {
        let t = backend.add(backend.sub(b.hi, r)?, a.hi)?;
        backend.add(backend.add(t, a.lo)?, b.lo)?
    };
    let p = add12(backend, r, s)?;
    Ok(FloatFloat::from_raw(p.hi, p.lo))
}

/// Float-float multiplication: exact product of the high parts plus the two
/// cross terms, renormalized. The `al * bl` term is dropped.
///
/// Relative error is at most `2^(4-2p)` (`2^-44` for binary32).
pub fn mul22<B: Backend>(
    backend: &B,
    a: FloatFloat<B::Value>,
    b: FloatFloat<B::Value>,
) -> Result<FloatFloat<B::Value>> {
    let t = mul12(backend, a.hi, b.hi)?;
    let cross = backend.add(backend.mul(a.hi, b.lo)?, backend.mul(a.lo, b.hi)?)?;
    let t3 = backend.add(cross, t.lo)?;
    let p = add12(backend, t.hi, t3)?;
    Ok(FloatFloat::from_raw(p.hi, p.lo))
}

impl FloatFloat<f32> {
    pub const ZERO: Self = Self::from_raw(0.0, 0.0);

    pub fn new(hi: f32, lo: f32) -> Result<Self> {
        ff_from_parts(&native_backend(), hi, lo)
    }

    /// Splits a double into its binary32 head and residual.
    pub fn from_f64(x: f64) -> Result<Self> {
        ff_from_wide(x)
    }

    /// Exact value as a double (a float-float has at most 49 bits of span).
    pub fn to_f64(self) -> f64 {
        ff_to_wide(self)
    }
}

impl From<f32> for FloatFloat<f32> {
    fn from(x: f32) -> Self {
        Self::from_raw(x, 0.0)
    }
}

/// `hi = RN32(x)`, `lo = RN32(x - hi)`, then normalized.
pub fn ff_from_wide(x: f64) -> Result<FloatFloat<f32>> {
    if !x.is_finite() || x.abs() > f32::MAX as f64 {
        return Err(Error::Overflow);
    }
    let hi = x as f32;
    if !hi.is_finite() {
        return Err(Error::Overflow);
    }
    if hi != 0.0 && hi.is_subnormal() {
        return Err(Error::Underflow);
    }
    let residual = x - hi as f64;
    let lo = residual as f32;
    if residual != 0.0 && residual.abs() < f32::MIN_POSITIVE as f64 {
        return Err(Error::Underflow);
    }
    ff_from_parts(&native_backend(), hi, lo)
}

pub fn ff_to_wide(a: FloatFloat<f32>) -> f64 {
    a.hi as f64 + a.lo as f64
}

fn hex32(x: f32) -> String {
    if x == 0.0 && x.is_sign_negative() {
        "-0x0p+0".to_string()
    } else {
        Dyadic::from_f32(x).to_hex()
    }
}

impl fmt::Display for FloatFloat<f32> {
    /// `(hi, lo)` as exact hex floats followed by the 44-bit decimal value.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}) = {:.13e}",
            hex32(self.hi),
            hex32(self.lo),
            ff_to_wide(*self)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpmodel::{sim_backend, FpFormat};

    const P30: f32 = 9.313_226e-10;

    fn ff(hi: f32, lo: f32) -> FloatFloat {
        FloatFloat::from_raw(hi, lo)
    }

    #[test]
    fn from_parts_examples() {
        let n = native_backend();
        assert_eq!(ff_from_parts(&n, 1.0, 0.0).unwrap(), ff(1.0, 0.0));
        assert_eq!(ff_from_parts(&n, P30, 1.0).unwrap(), ff(1.0, P30));
        assert_eq!(ff_from_parts(&n, 2.5, -2.5).unwrap(), ff(0.0, 0.0));
    }

    #[test]
    fn wide_conversions() {
        assert_eq!(ff_from_wide(1.0).unwrap(), ff(1.0, 0.0));
        let x = 1.0 + 2f64.powi(-40);
        assert_eq!(ff_from_wide(x).unwrap(), ff(1.0, 2f32.powi(-40)));
        assert_eq!(ff_to_wide(ff(4096.0, 1.0)), 4097.0);
        assert_eq!(ff_to_wide(ff_from_wide(x).unwrap()), x);
        assert_eq!(ff_from_wide(1e39), Err(Error::Overflow));
        assert_eq!(ff_from_wide(f64::NAN), Err(Error::Overflow));
        assert_eq!(ff_from_wide(1e-40), Err(Error::Underflow));
        assert_eq!(
            ff_from_wide(2f64.powi(-120) * (1.0 + 2f64.powi(-40))),
            Err(Error::Underflow)
        );
    }

    #[test]
    fn add22_examples() {
        let n = native_backend();
        let a = ff(1.5, 3.0 * 2f32.powi(-30));
        assert_eq!(add22(&n, a, FloatFloat::ZERO).unwrap(), a);
        assert_eq!(add22(&n, FloatFloat::ZERO, a).unwrap(), a);
        let a = ff(1.0, P30);
        assert_eq!(add22(&n, a, a).unwrap(), ff(2.0, 2f32.powi(-29)));
        let b = ff(-1.0, 2f32.powi(-35));
        let expect = (2f64.powi(-30) + 2f64.powi(-35)) as f32;
        assert_eq!(add22(&n, a, b).unwrap(), ff(expect, 0.0));
    }

    #[test]
    fn mul22_examples() {
        let n = native_backend();
        let one = ff(1.0, 0.0);
        for a in [ff(1.0, P30), ff(-3.0, 2f32.powi(-25)), ff(1e10, -7.0)] {
            assert_eq!(mul22(&n, a, one).unwrap(), a);
        }
        let a = ff(1.0 + 2f32.powi(-12), 0.0);
        assert_eq!(
            mul22(&n, a, a).unwrap(),
            ff(1.0 + 2f32.powi(-11), 2f32.powi(-24))
        );
        let a = ff(1.0, P30);
        assert_eq!(mul22(&n, a, a).unwrap(), ff(1.0, 2f32.powi(-29)));
    }

    #[test]
    fn results_are_normalized() {
        let n = native_backend();
        let a = ff_from_wide(std::f64::consts::PI).unwrap();
        let b = ff_from_wide(-std::f64::consts::E).unwrap();
        assert!(a.is_normalized(&n));
        assert!(add22(&n, a, b).unwrap().is_normalized(&n));
        assert!(mul22(&n, a, b).unwrap().is_normalized(&n));
        assert!(!ff(1.0, 1.0).is_normalized(&n));
    }

    #[test]
    fn works_on_simulated_backend() {
        let s = sim_backend(FpFormat::binary32());
        let v = |x: f32| s.value(x as f64).unwrap();
        let a = FloatFloat::from_raw(v(1.0), v(P30));
        let r = add22(&s, a, a).unwrap();
        assert_eq!(r, FloatFloat::from_raw(v(2.0), v(2f32.powi(-29))));
        let r = mul22(&s, a, a).unwrap();
        assert_eq!(r, FloatFloat::from_raw(v(1.0), v(2f32.powi(-29))));
    }

    #[test]
    fn display_shows_hex_and_decimal() {
        let text = ff(4096.0, 1.0).to_string();
        assert_eq!(text, "(0x1p+12, 0x1p+0) = 4.0970000000000e3");
    }
}
