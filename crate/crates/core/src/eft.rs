//! Error-free transformations over any [`Backend`].
//!
//! Each routine follows its classical operation sequence exactly, so the
//! exactness guarantees hold on any backend that meets the stated rounding
//! preconditions (round-to-nearest, or faithful rounding with a guard digit in
//! subtraction) and can be tested to fail on backends that do not.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::fpmodel::Backend;
use crate::oracle::Dyadic;

/// A rounded result and its error term, `hi + lo`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EftPair<V> {
    pub hi: V,
    pub lo: V,
}

impl<V: Copy> EftPair<V> {
    pub fn new(hi: V, lo: V) -> Self {
        Self { hi, lo }
    }

    /// Exact value `hi + lo`.
    pub fn to_dyadic<B: Backend<Value = V>>(&self, backend: &B) -> Dyadic {
        backend.to_dyadic(self.hi) + backend.to_dyadic(self.lo)
    }
}

/// Branchless two-sum: six operations, no comparison.
///
/// `s = a + b` rounded and `s + r = a + b` exactly, provided nothing
/// overflows and subtraction keeps a guard digit.
#[inline]
pub fn add12<B: Backend>(backend: &B, a: B::Value, b: B::Value) -> Result<EftPair<B::Value>> {
    let s = backend.add(a, b)?;
    let v = backend.sub(s, a)?;
    let r = backend.add(backend.sub(a, backend.sub(s, v)?)?, backend.sub(b, v)?)?;
    Ok(EftPair::new(s, r))
}

/// Two-sum with one magnitude test: swaps so that `|a| >= |b|`, then uses the
/// three-operation fast form.
#[inline]
pub fn add12_fast<B: Backend>(backend: &B, a: B::Value, b: B::Value) -> Result<EftPair<B::Value>> {
    let (a, b) = if backend.cmp_abs(a, b) == Ordering::Less {
        (b, a)
    } else {
        (a, b)
    };
    let s = backend.add(a, b)?;
    let r = backend.sub(b, backend.sub(s, a)?)?;
    Ok(EftPair::new(s, r))
}

/// Textbook two-sum with independent error terms for each operand. Used to
/// cross-check the single-expression form of [`add12`].
pub fn add12_textbook<B: Backend>(
    backend: &B,
    a: B::Value,
    b: B::Value,
) -> Result<EftPair<B::Value>> {
    let s = backend.add(a, b)?;
    let bv = backend.sub(s, a)?;
    let av = backend.sub(s, bv)?;
    let r = backend.add(backend.sub(a, av)?, backend.sub(b, bv)?)?;
    Ok(EftPair::new(s, r))
}

/// Default splitting point `ceil(p / 2)`.
pub fn default_split_point(precision: u32) -> u32 {
    precision.div_ceil(2)
}

fn check_split<B: Backend>(backend: &B, a: B::Value, s_point: u32) -> Result<()> {
    let fmt = backend.format();
    let p = fmt.precision;
    if p < 3 {
        return Err(Error::PrecisionTooSmall(p));
    }
    if 2 * s_point < p || s_point > p - 1 {
        return Err(Error::InvalidSplitPoint {
            s_point,
            precision: p,
        });
    }
    if let Some(e) = backend.exponent(a) {
        if e > fmt.emax - s_point as i32 - 1 {
            return Err(Error::SplitOverflow { s_point });
        }
    }
    Ok(())
}

/// Dekker's split into a `(p - s)`-bit high part and an `s`-bit low part,
/// `a = hi + lo` exactly.
pub fn split<B: Backend>(backend: &B, a: B::Value, s_point: u32) -> Result<EftPair<B::Value>> {
    check_split(backend, a, s_point)?;
    split_unchecked(backend, a, s_point)
}

#[inline]
fn split_unchecked<B: Backend>(
    backend: &B,
    a: B::Value,
    s_point: u32,
) -> Result<EftPair<B::Value>> {
    let factor = backend.add(backend.pow2(s_point as i32)?, backend.pow2(0)?)?;
    let c = backend.mul(factor, a)?;
    let a_big = backend.sub(c, a)?;
    let hi = backend.sub(c, a_big)?;
    let lo = backend.sub(a, hi)?;
    Ok(EftPair::new(hi, lo))
}

fn check_low_product<B: Backend>(backend: &B, a_lo: B::Value, b_lo: B::Value) -> Result<()> {
    let (Some(ea), Some(eb)) = (backend.exponent(a_lo), backend.exponent(b_lo)) else {
        return Ok(());
    };
    let emin = backend.format().emin;
    if ea + eb >= emin {
        return Ok(());
    }
    let exact = backend.to_dyadic(a_lo) * backend.to_dyadic(b_lo);
    if exact.msb_exponent().unwrap() < emin as i64 {
        Err(Error::UnderflowRisk)
    } else {
        Ok(())
    }
}

/// Dekker's product: `x = a * b` rounded and `x + y = a * b` exactly.
pub fn mul12<B: Backend>(backend: &B, a: B::Value, b: B::Value) -> Result<EftPair<B::Value>> {
    let p = backend.format().precision;
    if p < 6 {
        return Err(Error::PrecisionTooSmall(p));
    }
    let s_point = default_split_point(p);
    check_split(backend, a, s_point)?;
    check_split(backend, b, s_point)?;
    let x = backend.mul(a, b)?;
    let EftPair { hi: a_hi, lo: a_lo } = split_unchecked(backend, a, s_point)?;
    let EftPair { hi: b_hi, lo: b_lo } = split_unchecked(backend, b, s_point)?;
    check_low_product(backend, a_lo, b_lo)?;
    let err1 = backend.sub(x, backend.mul(a_hi, b_hi)?)?;
    let err2 = backend.sub(err1, backend.mul(a_lo, b_hi)?)?;
    let err3 = backend.sub(err2, backend.mul(a_hi, b_lo)?)?;
    let y = backend.sub(backend.mul(a_lo, b_lo)?, err3)?;
    Ok(EftPair::new(x, y))
}
