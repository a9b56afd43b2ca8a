//! Paranoia-style characterization of a backend's rounding.
//!
//! For each of `+ - * /` the probe draws positive operand pairs, measures the
//! error of the backend's result in ulps of that result against the exact
//! oracle, and reports the observed `[min, max]` interval. Positive operands
//! mean truncating arithmetic shows as `(-1, 0]` for add/mul and a two-sided
//! interval for subtraction, whose results change sign.
//!
//! Stimulus set (version 1), chosen by `index % 8`:
//!
//! | slot | operands |
//! |------|----------|
//! | 0-3  | independent uniform normals |
//! | 4    | near-equal pair `x, x(1 ± 2^-k)`, `k` in `1..=p` |
//! | 5    | all-ones significand against a uniform normal |
//! | 6    | exact ties: `a + ulp(a)/2` for add/sub, `1.5 * m` with `m < 4/3` odd for mul |
//! | 7    | uniform normals with exponents at most one apart |

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fpmodel::{Backend, FpFormat};
use crate::harness::sampling::{probe_exponents, random_normal, random_significand, sample_rng};
use crate::oracle::{error_ulps, error_ulps_quotient};

pub const STIMULUS_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ProbeOp {
    pub const ALL: [ProbeOp; 4] = [ProbeOp::Add, ProbeOp::Sub, ProbeOp::Mul, ProbeOp::Div];

    pub fn name(self) -> &'static str {
        match self {
            ProbeOp::Add => "add",
            ProbeOp::Sub => "sub",
            ProbeOp::Mul => "mul",
            ProbeOp::Div => "div",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ProbeOp::Add => "Addition",
            ProbeOp::Sub => "Subtraction",
            ProbeOp::Mul => "Multiplication",
            ProbeOp::Div => "Division",
        }
    }
}

impl fmt::Display for ProbeOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProbeOp {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ProbeOp::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| Error::UnknownOp(s.to_string()))
    }
}

/// Observed error interval, in ulps of the computed result.
///
/// `bounds` is `None` only when every sample was skipped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UlpInterval {
    pub op: ProbeOp,
    pub bounds: Option<(BigRational, BigRational)>,
    pub samples: u64,
    pub skipped: u64,
    pub seed: u64,
}

impl UlpInterval {
    pub fn lo_ulps(&self) -> Option<&BigRational> {
        self.bounds.as_ref().map(|b| &b.0)
    }

    pub fn hi_ulps(&self) -> Option<&BigRational> {
        self.bounds.as_ref().map(|b| &b.1)
    }

    pub fn width(&self) -> Option<BigRational> {
        self.bounds.as_ref().map(|(lo, hi)| hi - lo)
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        matches!(&self.bounds, Some((lo, hi)) if lo <= x && x <= hi)
    }
}

#[derive(Debug, Clone, Default)]
struct Acc {
    bounds: Option<(BigRational, BigRational)>,
    skipped: u64,
}

impl Acc {
    fn push(mut self, err: Option<BigRational>) -> Self {
        match err {
            None => self.skipped += 1,
            Some(e) => {
                self.bounds = Some(match self.bounds {
                    None => (e.clone(), e),
                    Some((lo, hi)) => (
                        if e < lo { e.clone() } else { lo },
                        if e > hi { e } else { hi },
                    ),
                })
            }
        }
        self
    }

    fn merge(self, other: Acc) -> Acc {
        let bounds = match (self.bounds, other.bounds) {
            (None, b) | (b, None) => b,
            (Some((l1, h1)), Some((l2, h2))) => Some((l1.min(l2), h1.max(h2))),
        };
        Acc {
            bounds,
            skipped: self.skipped + other.skipped,
        }
    }
}

/// Operand pair for one probe sample.
pub fn probe_operands<B: Backend>(
    backend: &B,
    op: ProbeOp,
    seed: u64,
    index: u64,
) -> Result<(B::Value, B::Value)> {
    let fmt = backend.format();
    let p = fmt.precision;
    let range = probe_exponents(fmt);
    let mut rng = sample_rng(seed, index);
    let x = random_normal(backend, &mut rng, range.clone(), false)?;
    let ex = backend.exponent(x).unwrap_or(0);
    match index % 8 {
        4 => {
            let k = rng.random_range(1..=p as i64);
            let x_exact = backend.to_dyadic(x);
            let delta = x_exact.mul_pow2(-k);
            let y = if rng.random::<bool>() {
                &x_exact + &delta
            } else {
                &x_exact - &delta
            };
            Ok((x, backend.from_dyadic(&y)?))
        }
        5 => {
            let ones = (1u64 << p) - 1;
            let a = backend.from_parts(false, ones, ex - p as i32 + 1)?;
            let b = random_normal(backend, &mut rng, range, false)?;
            Ok((a, b))
        }
        6 => match op {
            ProbeOp::Mul => {
                let a = backend.from_parts(false, 3, ex - 1)?;
                let third = (1u64 << (p - 1)) / 3;
                let m = ((1u64 << (p - 1)) + rng.random_range(0..third.max(1))) | 1;
                let eb = rng.random_range(range);
                Ok((a, backend.from_parts(false, m, eb - p as i32 + 1)?))
            }
            _ => Ok((x, backend.pow2(ex - p as i32)?)),
        },
        7 => {
            let eb = (ex + rng.random_range(-1..=1)).clamp(*range.start(), *range.end());
            let m = random_significand(&mut rng, p);
            Ok((x, backend.from_parts(false, m, eb - p as i32 + 1)?))
        }
        _ => Ok((x, random_normal(backend, &mut rng, range, false)?)),
    }
}

/// Error of one sample in ulps; `None` when the sample overflows.
pub fn sample_error<B: Backend>(
    backend: &B,
    op: ProbeOp,
    seed: u64,
    index: u64,
) -> Result<Option<BigRational>> {
    let (a, b) = match probe_operands(backend, op, seed, index) {
        Ok(pair) => pair,
        Err(Error::Overflow) => return Ok(None),
        Err(e) => return Err(e),
    };
    let computed = match op {
        ProbeOp::Add => backend.add(a, b),
        ProbeOp::Sub => backend.sub(a, b),
        ProbeOp::Mul => backend.mul(a, b),
        ProbeOp::Div => backend.div(a, b),
    };
    let computed = match computed {
        Ok(c) => backend.to_dyadic(c),
        Err(Error::Overflow) => return Ok(None),
        Err(e) => return Err(e),
    };
    let (da, db) = (backend.to_dyadic(a), backend.to_dyadic(b));
    let fmt: &FpFormat = backend.format();
    let err = match op {
        ProbeOp::Add => error_ulps(&computed, &(&da + &db), fmt),
        ProbeOp::Sub => error_ulps(&computed, &(&da - &db), fmt),
        ProbeOp::Mul => error_ulps(&computed, &(&da * &db), fmt),
        ProbeOp::Div => error_ulps_quotient(&computed, &da, &db, fmt),
    };
    match err {
        Ok(e) => Ok(Some(e)),
        Err(Error::BothZero) => Ok(Some(BigRational::zero())),
        Err(e) => Err(e),
    }
}

const CHUNK: u64 = 4096;

/// Running `[min, max]` of the per-sample error over `samples` stimuli.
pub fn probe_op<B: Backend>(
    backend: &B,
    op: ProbeOp,
    samples: u64,
    seed: u64,
) -> Result<UlpInterval> {
    if samples == 0 {
        return Err(Error::InvalidArgument(
            "probe needs at least one sample".into(),
        ));
    }
    let chunks = samples.div_ceil(CHUNK);
    let acc = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = Acc::default();
            for i in c * CHUNK..((c + 1) * CHUNK).min(samples) {
                acc = acc.push(sample_error(backend, op, seed, i)?);
            }
            Ok(acc)
        })
        .try_reduce(Acc::default, |a, b| Ok(a.merge(b)))?;
    Ok(UlpInterval {
        op,
        bounds: acc.bounds,
        samples,
        skipped: acc.skipped,
        seed,
    })
}

/// Table of intervals for all four operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeReport {
    pub backend: String,
    pub format: FpFormat,
    pub samples: u64,
    pub seed: u64,
    pub intervals: Vec<UlpInterval>,
}

pub fn probe_report<B: Backend>(backend: &B, samples: u64, seed: u64) -> Result<ProbeReport> {
    let intervals = ProbeOp::ALL
        .into_iter()
        .map(|op| probe_op(backend, op, samples, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbeReport {
        backend: backend.name(),
        format: *backend.format(),
        samples,
        seed,
        intervals,
    })
}
