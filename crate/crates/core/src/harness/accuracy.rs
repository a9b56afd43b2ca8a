//! Maximum observed error of each operator against the exact oracle.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::{
    accuracy_exponents, random_all_ones, random_close_pair, random_normal, sample_rng,
};
use crate::eft::{add12, default_split_point, mul12, split};
use crate::error::{Error, Result};
use crate::ff::{add22, ff_from_parts, mul22, FloatFloat};
use crate::fpmodel::Backend;
use crate::oracle::{error_bits, Dyadic};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AccuracyOp {
    Add12,
    Mul12,
    Add22,
    Mul22,
    Split,
}

impl AccuracyOp {
    pub const ALL: [AccuracyOp; 5] = [
        AccuracyOp::Add12,
        AccuracyOp::Mul12,
        AccuracyOp::Add22,
        AccuracyOp::Mul22,
        AccuracyOp::Split,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AccuracyOp::Add12 => "add12",
            AccuracyOp::Mul12 => "mul12",
            AccuracyOp::Add22 => "add22",
            AccuracyOp::Mul22 => "mul22",
            AccuracyOp::Split => "split",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            AccuracyOp::Split => 1,
            AccuracyOp::Add12 | AccuracyOp::Mul12 => 2,
            AccuracyOp::Add22 | AccuracyOp::Mul22 => 4,
        }
    }
}

impl fmt::Display for AccuracyOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AccuracyOp {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        AccuracyOp::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| Error::UnknownOp(s.to_string()))
    }
}

/// Result of evaluating one operand tuple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseOutcome {
    /// `log2` of the relative error; `-inf` when exact.
    pub error_bits: f64,
    /// `log2` of the relative error the operator's bound permits here;
    /// `-inf` for the exact transformations.
    pub bound_bits: f64,
    pub violation: bool,
}

/// Maximum observed error of one operator over a seeded random run.
///
/// For Add22 the permitted error depends on the operands, so `bound_bits` is
/// the loosest per-sample bound seen and violations are counted against each
/// sample's own bound.
#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyReport {
    pub op: AccuracyOp,
    pub backend: String,
    pub samples: u64,
    pub seed: u64,
    pub max_error_bits: f64,
    pub bound_bits: f64,
    pub violations: u64,
    /// Operands of the first sample reaching `max_error_bits`.
    pub worst_case: Vec<Dyadic>,
    pub worst_index: u64,
}

impl AccuracyReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn lsb_exponent<B: Backend>(backend: &B, x: B::Value) -> Option<i32> {
    backend
        .exponent(x)
        .map(|e| e - backend.format().precision as i32 + 1)
}

/// Operands stay in the regime the error bounds assume: every nonzero
/// component is normal with its last bit at or above `2^emin` (so sums and
/// differences cannot go subnormal) and every product the operator forms has
/// both its last bit at or above `2^emin` and its leading bit well below the
/// overflow threshold.
pub fn in_domain<B: Backend>(backend: &B, op: AccuracyOp, operands: &[B::Value]) -> bool {
    let fmt = backend.format();
    for &x in operands {
        if backend.is_zero(x) {
            continue;
        }
        if backend.is_subnormal(x) || lsb_exponent(backend, x).is_none_or(|l| l < fmt.emin) {
            return false;
        }
    }
    let product_ok = |x: B::Value, y: B::Value| match (
        lsb_exponent(backend, x),
        lsb_exponent(backend, y),
        backend.exponent(x),
        backend.exponent(y),
    ) {
        (Some(lx), Some(ly), Some(ex), Some(ey)) => lx + ly >= fmt.emin && ex + ey <= fmt.emax - 2,
        _ => true,
    };
    match op {
        AccuracyOp::Mul12 => product_ok(operands[0], operands[1]),
        AccuracyOp::Mul22 => {
            product_ok(operands[0], operands[2])
                && product_ok(operands[0], operands[3])
                && product_ok(operands[1], operands[2])
        }
        _ => true,
    }
}

fn random_ff<B: Backend, R: Rng>(
    backend: &B,
    rng: &mut R,
    hi: B::Value,
) -> Result<FloatFloat<B::Value>> {
    let p = backend.format().precision as i32;
    let e = backend.exponent(hi).unwrap();
    let k = rng.random_range(1..=8);
    let lo_exp = e - p - k;
    let lo = random_normal(backend, rng, lo_exp..=lo_exp, true)?;
    ff_from_parts(backend, hi, lo)
}

const MAX_DRAWS: usize = 1000;

/// Operands for sample `index`, redrawn from the same stream until they fall
/// in [`in_domain`].
///
/// Three samples in four are uniform over [`accuracy_exponents`]; every
/// fourth uses [`random_close_pair`] (for the float-float ops, as the two
/// high parts) since uniform draws almost never produce the carry patterns
/// that break the transformations on weak arithmetic.
pub fn draw_case<B: Backend>(
    backend: &B,
    op: AccuracyOp,
    seed: u64,
    index: u64,
) -> Result<Vec<B::Value>> {
    let mut rng = sample_rng(seed, index);
    let range = accuracy_exponents(backend.format());
    let adversarial = index % 4 == 3;
    for _ in 0..MAX_DRAWS {
        let (x, y) = if adversarial {
            random_close_pair(backend, &mut rng, range.clone())?
        } else {
            (
                random_normal(backend, &mut rng, range.clone(), true)?,
                random_normal(backend, &mut rng, range.clone(), true)?,
            )
        };
        let case = match op {
            AccuracyOp::Split if adversarial => {
                let e = rng.random_range(range.clone());
                vec![random_all_ones(backend, &mut rng, e)?]
            }
            AccuracyOp::Split => vec![x],
            AccuracyOp::Add12 | AccuracyOp::Mul12 => vec![x, y],
            AccuracyOp::Add22 | AccuracyOp::Mul22 => {
                let a = random_ff(backend, &mut rng, x)?;
                let b = random_ff(backend, &mut rng, y)?;
                vec![a.hi, a.lo, b.hi, b.lo]
            }
        };
        if in_domain(backend, op, &case) {
            return Ok(case);
        }
    }
    Err(Error::InvalidArgument(format!(
        "no in-domain operands for {op} on {} after {MAX_DRAWS} draws",
        backend.name()
    )))
}

fn outcome(computed: &Dyadic, exact: &Dyadic, bound_bits: f64, violation: bool) -> CaseOutcome {
    let bits = if exact.is_zero() {
        if computed.is_zero() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    } else {
        error_bits(computed, exact).unwrap_or(f64::INFINITY)
    };
    CaseOutcome {
        error_bits: bits,
        bound_bits,
        violation,
    }
}

fn failed() -> CaseOutcome {
    CaseOutcome {
        error_bits: f64::INFINITY,
        bound_bits: f64::NEG_INFINITY,
        violation: true,
    }
}

/// Evaluates the operator on one operand tuple and checks its guarantee.
pub fn evaluate<B: Backend>(backend: &B, op: AccuracyOp, operands: &[B::Value]) -> CaseOutcome {
    match evaluate_inner(backend, op, operands) {
        Ok(o) => o,
        Err(_) => failed(),
    }
}

fn evaluate_inner<B: Backend>(backend: &B, op: AccuracyOp, v: &[B::Value]) -> Result<CaseOutcome> {
    let fmt = backend.format();
    let p = fmt.precision as i64;
    let d = |x: B::Value| backend.to_dyadic(x);
    match op {
        AccuracyOp::Add12 | AccuracyOp::Mul12 => {
            let (pair, exact) = if op == AccuracyOp::Add12 {
                (add12(backend, v[0], v[1])?, d(v[0]) + d(v[1]))
            } else {
                (mul12(backend, v[0], v[1])?, d(v[0]) * d(v[1]))
            };
            let computed = pair.to_dyadic(backend);
            let violation = computed != exact;
            Ok(outcome(&computed, &exact, f64::NEG_INFINITY, violation))
        }
        AccuracyOp::Split => {
            let s_point = default_split_point(fmt.precision);
            let pair = split(backend, v[0], s_point)?;
            let (hi, lo) = (d(pair.hi), d(pair.lo));
            let exact = d(v[0]);
            let computed = &hi + &lo;
            let widths_ok = hi.significant_bits() <= (fmt.precision - s_point) as u64
                && lo.significant_bits() <= s_point as u64;
            let violation = computed != exact || !widths_ok || hi.abs() < lo.abs();
            Ok(outcome(&computed, &exact, f64::NEG_INFINITY, violation))
        }
        AccuracyOp::Add22 | AccuracyOp::Mul22 => {
            let a = FloatFloat::from_raw(v[0], v[1]);
            let b = FloatFloat::from_raw(v[2], v[3]);
            let (r, exact, bound) = if op == AccuracyOp::Add22 {
                let exact = a.to_dyadic(backend) + b.to_dyadic(backend);
                let lows = (d(a.lo) + d(b.lo)).abs().mul_pow2(-p);
                let whole = exact.abs().mul_pow2(4 - 2 * p);
                let bound = if lows > whole { lows } else { whole };
                (add22(backend, a, b)?, exact, bound)
            } else {
                let exact = a.to_dyadic(backend) * b.to_dyadic(backend);
                let bound = exact.abs().mul_pow2(4 - 2 * p);
                (mul22(backend, a, b)?, exact, bound)
            };
            let computed = r.to_dyadic(backend);
            let violation = (&computed - &exact).abs() > bound;
            let bound_bits = if exact.is_zero() {
                f64::NEG_INFINITY
            } else {
                bound.log2_abs() - exact.log2_abs()
            };
            Ok(outcome(&computed, &exact, bound_bits, violation))
        }
    }
}

/// Re-evaluates a recorded worst case given as exact operand values.
pub fn evaluate_case<B: Backend>(
    backend: &B,
    op: AccuracyOp,
    operands: &[Dyadic],
) -> Result<CaseOutcome> {
    if operands.len() != op.arity() {
        return Err(Error::InvalidArgument(format!(
            "{op} takes {} operands, got {}",
            op.arity(),
            operands.len()
        )));
    }
    let values = operands
        .iter()
        .map(|x| {
            let v = backend.from_dyadic(x)?;
            if backend.to_dyadic(v) != *x {
                return Err(Error::InvalidArgument(format!(
                    "{x} is not representable in {}",
                    backend.format()
                )));
            }
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(evaluate(backend, op, &values))
}

#[derive(Debug, Clone, Copy)]
struct Acc {
    max_bits: f64,
    worst: u64,
    bound_bits: f64,
    violations: u64,
}

impl Acc {
    fn empty() -> Self {
        Self {
            max_bits: f64::NEG_INFINITY,
            worst: u64::MAX,
            bound_bits: f64::NEG_INFINITY,
            violations: 0,
        }
    }

    fn push(mut self, index: u64, o: CaseOutcome) -> Self {
        if o.error_bits > self.max_bits || (o.error_bits == self.max_bits && index < self.worst) {
            self.max_bits = o.error_bits;
            self.worst = index;
        }
        self.bound_bits = self.bound_bits.max(o.bound_bits);
        self.violations += u64::from(o.violation);
        self
    }

    fn merge(self, other: Acc) -> Acc {
        let (max_bits, worst) = if other.max_bits > self.max_bits
            || (other.max_bits == self.max_bits && other.worst < self.worst)
        {
            (other.max_bits, other.worst)
        } else {
            (self.max_bits, self.worst)
        };
        Acc {
            max_bits,
            worst,
            bound_bits: self.bound_bits.max(other.bound_bits),
            violations: self.violations + other.violations,
        }
    }
}

const CHUNK: u64 = 4096;

/// Samples `samples` operand tuples and records the largest error and every
/// bound violation.
pub fn run_accuracy<B: Backend>(
    op: AccuracyOp,
    backend: &B,
    samples: u64,
    seed: u64,
) -> Result<AccuracyReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument(
            "accuracy needs at least one sample".into(),
        ));
    }
    let chunks = samples.div_ceil(CHUNK);
    let acc = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = Acc::empty();
            for i in c * CHUNK..((c + 1) * CHUNK).min(samples) {
                let case = draw_case(backend, op, seed, i)?;
                acc = acc.push(i, evaluate(backend, op, &case));
            }
            Ok(acc)
        })
        .try_reduce(Acc::empty, |a, b| Ok(a.merge(b)))?;
    let worst_case = draw_case(backend, op, seed, acc.worst)?
        .into_iter()
        .map(|v| backend.to_dyadic(v))
        .collect();
    let bound_bits = match op {
        AccuracyOp::Mul22 => 4.0 - 2.0 * backend.format().precision as f64,
        _ => acc.bound_bits,
    };
    Ok(AccuracyReport {
        op,
        backend: backend.name(),
        samples,
        seed,
        max_error_bits: acc.max_bits,
        bound_bits,
        violations: acc.violations,
        worst_case,
        worst_index: acc.worst,
    })
}
