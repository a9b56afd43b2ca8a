//! Throughput of the operators on the host, normalized to plain addition.
//!
//! Each `(op, size)` cell applies the operator elementwise over pre-generated
//! vectors `reps` times on the calling thread and keeps the median wall time.

use std::fmt;
use std::hint::black_box;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::sampling::{random_normal, sample_rng};
use crate::eft::{add12, mul12};
use crate::error::{Error, Result};
use crate::ff::{add22, ff_from_parts, mul22, FloatFloat};
use crate::fpmodel::{native_backend, Backend, Native};

/// Size ladder used when none is given.
pub const DEFAULT_SIZES: [usize; 5] = [4096, 16384, 65536, 262144, 1048576];

pub const BASELINE_SIZE: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchOp {
    Add,
    Mul,
    Mad,
    Add12,
    Mul12,
    Add22,
    Mul22,
}

impl BenchOp {
    pub const ALL: [BenchOp; 7] = [
        BenchOp::Add,
        BenchOp::Mul,
        BenchOp::Mad,
        BenchOp::Add12,
        BenchOp::Mul12,
        BenchOp::Add22,
        BenchOp::Mul22,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchOp::Add => "add",
            BenchOp::Mul => "mul",
            BenchOp::Mad => "mad",
            BenchOp::Add12 => "add12",
            BenchOp::Mul12 => "mul12",
            BenchOp::Add22 => "add22",
            BenchOp::Mul22 => "mul22",
        }
    }
}

impl fmt::Display for BenchOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchOp {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        BenchOp::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| Error::UnknownOp(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchCell {
    pub size: usize,
    pub op: BenchOp,
    pub median: Duration,
    /// `median / baseline median`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub sizes: Vec<usize>,
    pub ops: Vec<BenchOp>,
    pub reps: usize,
    pub baseline_size: usize,
    pub baseline: Duration,
    /// Row-major: all ops for `sizes[0]`, then `sizes[1]`, ...
    pub cells: Vec<BenchCell>,
    pub timer_note: String,
}

impl BenchReport {
    pub fn cell(&self, size: usize, op: BenchOp) -> Option<&BenchCell> {
        self.cells.iter().find(|c| c.size == size && c.op == op)
    }
}

struct Data {
    a: Vec<f32>,
    b: Vec<f32>,
    c: Vec<f32>,
    fa: Vec<FloatFloat>,
    fb: Vec<FloatFloat>,
}

fn generate(n: &Native, size: usize, seed: u64) -> Result<Data> {
    let mut rng = sample_rng(seed, size as u64);
    let mut draw = || random_normal(n, &mut rng, -10..=10, true);
    let mut d = Data {
        a: Vec::with_capacity(size),
        b: Vec::with_capacity(size),
        c: Vec::with_capacity(size),
        fa: Vec::with_capacity(size),
        fb: Vec::with_capacity(size),
    };
    for _ in 0..size {
        d.a.push(draw()?);
        d.b.push(draw()?);
        d.c.push(draw()?);
        let (h, l) = (draw()?, draw()? * 2f32.powi(-30));
        d.fa.push(ff_from_parts(n, h, l)?);
        let (h, l) = (draw()?, draw()? * 2f32.powi(-30));
        d.fb.push(ff_from_parts(n, h, l)?);
    }
    Ok(d)
}

fn run_once(
    n: &Native,
    op: BenchOp,
    d: &Data,
    out: &mut [f32],
    ff_out: &mut [FloatFloat],
) -> Result<Duration> {
    let start = Instant::now();
    let pairs = d.a.iter().zip(&d.b);
    let ff_pairs = d.fa.iter().zip(&d.fb);
    match op {
        BenchOp::Add => {
            for (o, (&a, &b)) in out.iter_mut().zip(pairs) {
                *o = n.add(a, b)?;
            }
        }
        BenchOp::Mul => {
            for (o, (&a, &b)) in out.iter_mut().zip(pairs) {
                *o = n.mul(a, b)?;
            }
        }
        BenchOp::Mad => {
            for (o, ((&a, &b), &c)) in out.iter_mut().zip(pairs.zip(&d.c)) {
                *o = n.add(n.mul(a, b)?, c)?;
            }
        }
        BenchOp::Add12 => {
            for (o, (&a, &b)) in ff_out.iter_mut().zip(pairs) {
                let p = add12(n, a, b)?;
                *o = FloatFloat::from_raw(p.hi, p.lo);
            }
        }
        BenchOp::Mul12 => {
            for (o, (&a, &b)) in ff_out.iter_mut().zip(pairs) {
                let p = mul12(n, a, b)?;
                *o = FloatFloat::from_raw(p.hi, p.lo);
            }
        }
        BenchOp::Add22 => {
            for (o, (&a, &b)) in ff_out.iter_mut().zip(ff_pairs) {
                *o = add22(n, a, b)?;
            }
        }
        BenchOp::Mul22 => {
            for (o, (&a, &b)) in ff_out.iter_mut().zip(ff_pairs) {
                *o = mul22(n, a, b)?;
            }
        }
    }
    black_box(&out);
    black_box(&ff_out);
    Ok(start.elapsed())
}

fn median_time(n: &Native, op: BenchOp, d: &Data, reps: usize) -> Result<Duration> {
    let size = d.a.len();
    let mut out = vec![0f32; size];
    let mut ff_out = vec![FloatFloat::ZERO; size];
    run_once(n, op, black_box(d), &mut out, &mut ff_out)?;
    let mut times = (0..reps)
        .map(|_| run_once(n, op, black_box(d), &mut out, &mut ff_out))
        .collect::<Result<Vec<_>>>()?;
    times.sort();
    Ok(times[reps / 2])
}

/// Times every op at every size on the host `f32` backend.
///
/// The baseline is addition at 4096 elements, or at the smallest size when
/// 4096 is not in `sizes`; it is timed even if `ops` omits `add`.
pub fn run_bench(ops: &[BenchOp], sizes: &[usize], reps: usize, seed: u64) -> Result<BenchReport> {
    if sizes.is_empty() || ops.is_empty() {
        return Err(Error::InvalidArgument(
            "bench needs at least one size and one op".into(),
        ));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) || sizes[0] == 0 {
        return Err(Error::InvalidArgument(
            "bench sizes must be positive and strictly increasing".into(),
        ));
    }
    if reps < 3 {
        return Err(Error::InvalidArgument(format!(
            "bench needs at least 3 repetitions, got {reps}"
        )));
    }
    let n = native_backend();
    let baseline_size = if sizes.contains(&BASELINE_SIZE) {
        BASELINE_SIZE
    } else {
        sizes[0]
    };
    let mut cells = Vec::with_capacity(sizes.len() * ops.len());
    let mut baseline = None;
    for &size in sizes {
        let data = generate(&n, size, seed)?;
        if size == baseline_size {
            baseline = Some(median_time(&n, BenchOp::Add, &data, reps)?);
        }
        for &op in ops {
            let t = if size == baseline_size && op == BenchOp::Add {
                baseline.unwrap()
            } else {
                median_time(&n, op, &data, reps)?
            };
            cells.push(BenchCell {
                size,
                op,
                median: t,
                ratio: 0.0,
            });
        }
    }
    let baseline = baseline.unwrap();
    let base = baseline.as_secs_f64().max(1e-9);
    for c in &mut cells {
        c.ratio = if c.size == baseline_size && c.op == BenchOp::Add {
            1.0
        } else {
            c.median.as_secs_f64() / base
        };
    }
    Ok(BenchReport {
        sizes: sizes.to_vec(),
        ops: ops.to_vec(),
        reps,
        baseline_size,
        baseline,
        cells,
        timer_note: format!(
            "median of {reps} single-threaded runs after one warm-up, std::time::Instant"
        ),
    })
}
