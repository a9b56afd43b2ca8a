//! Invariant suite run against one backend, used as a CI gate.

use rand::Rng;
use rayon::prelude::*;

use super::accuracy::{draw_case, evaluate, AccuracyOp};
use super::sampling::{accuracy_exponents, random_normal, sample_rng};
use crate::eft::add12_fast;
use crate::error::{Error, Result};
use crate::fpmodel::Backend;
use crate::oracle::Dyadic;

/// Checks in the order they run.
pub const CHECKS: [&str; 7] = [
    "sterbenz",
    "add12",
    "add12_fast",
    "mul12",
    "split",
    "add22",
    "mul22",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub name: &'static str,
    /// False when the property is not promised for this backend's arithmetic;
    /// such checks still run and count violations but do not fail the suite.
    pub gating: bool,
    pub samples: u64,
    pub violations: u64,
    /// Operands of the lowest-index failing sample.
    pub witness: Option<Vec<Dyadic>>,
    pub witness_index: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelftestReport {
    pub backend: String,
    pub samples: u64,
    pub seed: u64,
    pub checks: Vec<CheckReport>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| !c.gating || c.violations == 0)
    }

    pub fn check(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Pair with `y/2 <= x <= 2y`, both of one sign, exponents at most one apart.
fn sterbenz_pair<B: Backend>(backend: &B, seed: u64, index: u64) -> Result<(B::Value, B::Value)> {
    let mut rng = sample_rng(seed, index);
    let range = accuracy_exponents(backend.format());
    let negative = rng.random::<bool>();
    loop {
        let x = random_normal(backend, &mut rng, range.clone(), false)?;
        let e = backend.exponent(x).unwrap() + rng.random_range(-1..=1);
        let y = random_normal(backend, &mut rng, e..=e, false)?;
        let (dx, dy) = (backend.to_dyadic(x), backend.to_dyadic(y));
        if dy.mul_pow2(-1) <= dx && dx <= dy.mul_pow2(1) {
            return Ok(if negative {
                (backend.neg(x), backend.neg(y))
            } else {
                (x, y)
            });
        }
    }
}

/// `Some(operands)` when sample `index` violates check `name`.
fn check_sample<B: Backend>(
    backend: &B,
    name: &str,
    seed: u64,
    index: u64,
) -> Result<Option<Vec<B::Value>>> {
    let fails = |op: AccuracyOp| -> Result<Option<Vec<B::Value>>> {
        let case = draw_case(backend, op, seed, index)?;
        Ok(evaluate(backend, op, &case).violation.then_some(case))
    };
    match name {
        "sterbenz" => {
            let (x, y) = sterbenz_pair(backend, seed, index)?;
            let exact = backend.to_dyadic(x) - backend.to_dyadic(y);
            let ok = matches!(backend.sub(x, y), Ok(d) if backend.to_dyadic(d) == exact);
            Ok((!ok).then(|| vec![x, y]))
        }
        "add12_fast" => {
            let case = draw_case(backend, AccuracyOp::Add12, seed, index)?;
            let exact = backend.to_dyadic(case[0]) + backend.to_dyadic(case[1]);
            let ok = matches!(
                add12_fast(backend, case[0], case[1]),
                Ok(p) if p.to_dyadic(backend) == exact
            );
            Ok((!ok).then_some(case))
        }
        "add12" => fails(AccuracyOp::Add12),
        "mul12" => fails(AccuracyOp::Mul12),
        "split" => fails(AccuracyOp::Split),
        "add22" => fails(AccuracyOp::Add22),
        "mul22" => fails(AccuracyOp::Mul22),
        other => Err(Error::UnknownOp(other.to_string())),
    }
}

/// Whether the check's guarantee applies to the backend's arithmetic.
///
/// Sterbenz, Add12, Mul12 and Split need a guard digit. The fast two-sum
/// and the float-float bounds are stated for correctly rounded
/// round-to-nearest arithmetic only.
fn is_gating<B: Backend>(backend: &B, name: &str) -> bool {
    match name {
        "add12_fast" | "add22" | "mul22" => backend.format().is_correctly_rounded_nearest(),
        _ => true,
    }
}

const CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy)]
struct Tally {
    violations: u64,
    first: Option<u64>,
}

impl Tally {
    fn merge(self, other: Tally) -> Tally {
        let first = match (self.first, other.first) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Tally {
            violations: self.violations + other.violations,
            first,
        }
    }
}

/// Runs one check over `samples` seeded samples.
pub fn run_check<B: Backend>(
    backend: &B,
    name: &'static str,
    samples: u64,
    seed: u64,
) -> Result<CheckReport> {
    let tally = (0..samples.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut t = Tally {
                violations: 0,
                first: None,
            };
            for i in c * CHUNK..((c + 1) * CHUNK).min(samples) {
                if check_sample(backend, name, seed, i)?.is_some() {
                    t.violations += 1;
                    t.first.get_or_insert(i);
                }
            }
            Ok(t)
        })
        .try_reduce(
            || Tally {
                violations: 0,
                first: None,
            },
            |a, b| Ok(a.merge(b)),
        )?;
    let witness = match tally.first {
        Some(i) => check_sample(backend, name, seed, i)?
            .map(|v| v.into_iter().map(|x| backend.to_dyadic(x)).collect()),
        None => None,
    };
    Ok(CheckReport {
        name,
        gating: is_gating(backend, name),
        samples,
        violations: tally.violations,
        witness,
        witness_index: tally.first,
    })
}

/// Runs every check in [`CHECKS`].
pub fn run_selftest<B: Backend>(backend: &B, samples: u64, seed: u64) -> Result<SelftestReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument(
            "selftest needs at least one sample".into(),
        ));
    }
    let checks = CHECKS
        .iter()
        .map(|&name| run_check(backend, name, samples, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(SelftestReport {
        backend: backend.name(),
        samples,
        seed,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpmodel::{native_backend, sim_backend, FpFormat, GuardDigits, Rounding};

    #[test]
    fn native_passes() {
        let r = run_selftest(&native_backend(), 20_000, 5).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.checks.iter().all(|c| c.gating && c.violations == 0));
    }

    #[test]
    fn no_guard_digit_fails_with_witness() {
        let s = sim_backend(FpFormat::binary32().with_guard(GuardDigits::Zero));
        let r = run_selftest(&s, 5_000, 5).unwrap();
        assert!(!r.passed());
        for name in ["sterbenz", "add12"] {
            let c = r.check(name).unwrap();
            assert!(c.violations > 0, "{name}");
            let w = c.witness.as_ref().unwrap();
            assert_eq!(w.len(), 2);
        }
        let c = r.check("sterbenz").unwrap();
        let w = c.witness.as_ref().unwrap();
        let (x, y) = (&w[0], &w[1]);
        assert!(y.abs().mul_pow2(-1) <= x.abs() && x.abs() <= y.abs().mul_pow2(1));
    }

    #[test]
    fn chopped_with_guard_keeps_exact_transformations() {
        let s = sim_backend(
            FpFormat::binary32()
                .with_rounding(Rounding::TowardZero)
                .with_guard(GuardDigits::One),
        );
        let r = run_selftest(&s, 10_000, 5).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(!r.check("add22").unwrap().gating);
    }

    #[test]
    fn unknown_check_is_an_error() {
        assert!(run_check(&native_backend(), "div12", 10, 0).is_err());
        assert!(run_selftest(&native_backend(), 0, 0).is_err());
    }
}
