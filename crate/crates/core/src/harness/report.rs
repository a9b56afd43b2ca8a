//! Text, JSON and CSV rendering of the harness reports.
//!
//! Values are written as exact hex floats next to a decimal approximation and
//! ulp intervals as exact fractions. Only the bench report carries timings,
//! so the other reports are byte-identical across runs with the same seed.

use std::fmt::Write as _;
use std::str::FromStr;

use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use super::accuracy::AccuracyReport;
use super::bench::BenchReport;
use super::selftest::SelftestReport;
use crate::error::{Error, Result};
use crate::oracle::{format_error_bits, format_rational, rational_to_f64, Dyadic};
use crate::probe::{ProbeReport, STIMULUS_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(OutputFormat::Text),
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            _ => Err(Error::InvalidArgument(format!(
                "unknown output format {s:?}"
            ))),
        }
    }
}

pub trait Render {
    fn to_text(&self) -> String;
    fn to_json(&self) -> Value;
    fn csv_rows(&self) -> (Vec<&'static str>, Vec<Vec<String>>);
}

pub fn render<R: Render>(report: &R, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Text => Ok(report.to_text()),
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&report.to_json())
                .map_err(|e| Error::InvalidArgument(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        OutputFormat::Csv => {
            let (header, rows) = report.csv_rows();
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Error::InvalidArgument(e.to_string());
            w.write_record(&header).map_err(io)?;
            for row in rows {
                w.write_record(&row).map_err(io)?;
            }
            let bytes = w
                .into_inner()
                .map_err(|e| Error::InvalidArgument(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Error::InvalidArgument(e.to_string()))
        }
    }
}

#[derive(Serialize)]
struct Float {
    hex: String,
    decimal: String,
}

fn float(x: &Dyadic) -> Float {
    Float {
        hex: x.to_hex(),
        decimal: format!("{:e}", x.to_f64()),
    }
}

/// Finite values as numbers, infinities as the strings `"-inf"` / `"inf"`.
fn bits_json(bits: f64) -> Value {
    if bits.is_finite() {
        json!(bits)
    } else if bits < 0.0 {
        json!("-inf")
    } else {
        json!("inf")
    }
}

fn bits_csv(bits: f64) -> String {
    if bits.is_finite() {
        bits.to_string()
    } else if bits < 0.0 {
        "-inf".into()
    } else {
        "inf".into()
    }
}

/// Decimal with at most nine fractional digits, trailing zeros trimmed.
fn short_decimal(r: &BigRational) -> String {
    let s = format!("{:.9}", rational_to_f64(r));
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

impl Render for AccuracyReport {
    fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{} on {}, {} samples, seed {}",
            self.op, self.backend, self.samples, self.seed
        );
        let _ = writeln!(
            s,
            "  max error   {} bits",
            format_error_bits(self.max_error_bits)
        );
        let _ = writeln!(
            s,
            "  bound       {} bits",
            format_error_bits(self.bound_bits)
        );
        let _ = writeln!(s, "  violations  {}", self.violations);
        let ops: Vec<String> = self.worst_case.iter().map(Dyadic::to_hex).collect();
        let _ = writeln!(s, "  worst case  #{}: {}", self.worst_index, ops.join(" "));
        s
    }

    fn to_json(&self) -> Value {
        json!({
            "op": self.op,
            "backend": self.backend,
            "samples": self.samples,
            "seed": self.seed,
            "max_error_bits": bits_json(self.max_error_bits),
            "bound_bits": bits_json(self.bound_bits),
            "violations": self.violations,
            "worst_index": self.worst_index,
            "worst_case": self.worst_case.iter().map(float).collect::<Vec<_>>(),
        })
    }

    fn csv_rows(&self) -> (Vec<&'static str>, Vec<Vec<String>>) {
        let header = vec![
            "op",
            "backend",
            "samples",
            "seed",
            "max_error_bits",
            "bound_bits",
            "violations",
            "worst_index",
            "worst_case",
        ];
        let worst: Vec<String> = self.worst_case.iter().map(Dyadic::to_hex).collect();
        let row = vec![
            self.op.to_string(),
            self.backend.clone(),
            self.samples.to_string(),
            self.seed.to_string(),
            bits_csv(self.max_error_bits),
            bits_csv(self.bound_bits),
            self.violations.to_string(),
            self.worst_index.to_string(),
            worst.join(" "),
        ];
        (header, vec![row])
    }
}

impl Render for ProbeReport {
    fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "Rounding error in ulps, {}", self.backend);
        let _ = writeln!(
            s,
            "{} samples per operation, seed {}, stimuli v{}",
            self.samples, self.seed, STIMULUS_VERSION
        );
        let _ = writeln!(s, "{:<16} Interval", "Operation");
        for iv in &self.intervals {
            let range = match &iv.bounds {
                Some((lo, hi)) => format!("[{}, {}]", short_decimal(lo), short_decimal(hi)),
                None => "(no samples)".into(),
            };
            let _ = write!(s, "{:<16} {}", iv.op.label(), range);
            if iv.skipped > 0 {
                let _ = write!(s, "  ({} overflowing samples skipped)", iv.skipped);
            }
            s.push('\n');
        }
        s
    }

    fn to_json(&self) -> Value {
        let intervals: Vec<Value> = self
            .intervals
            .iter()
            .map(|iv| {
                json!({
                    "op": iv.op,
                    "lo_ulps": iv.lo_ulps().map(format_rational),
                    "hi_ulps": iv.hi_ulps().map(format_rational),
                    "lo_decimal": iv.lo_ulps().map(rational_to_f64),
                    "hi_decimal": iv.hi_ulps().map(rational_to_f64),
                    "samples": iv.samples,
                    "skipped": iv.skipped,
                    "seed": iv.seed,
                })
            })
            .collect();
        json!({
            "backend": self.backend,
            "format": self.format.to_string(),
            "samples": self.samples,
            "seed": self.seed,
            "stimulus_version": STIMULUS_VERSION,
            "intervals": intervals,
        })
    }

    fn csv_rows(&self) -> (Vec<&'static str>, Vec<Vec<String>>) {
        let header = vec![
            "op", "lo_ulps", "hi_ulps", "samples", "skipped", "seed", "backend",
        ];
        let rows = self
            .intervals
            .iter()
            .map(|iv| {
                vec![
                    iv.op.to_string(),
                    iv.lo_ulps().map(format_rational).unwrap_or_default(),
                    iv.hi_ulps().map(format_rational).unwrap_or_default(),
                    iv.samples.to_string(),
                    iv.skipped.to_string(),
                    iv.seed.to_string(),
                    self.backend.clone(),
                ]
            })
            .collect();
        (header, rows)
    }
}

impl Render for SelftestReport {
    fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "selftest on {}, {} samples per check, seed {}",
            self.backend, self.samples, self.seed
        );
        for c in &self.checks {
            let status = match (c.violations, c.gating) {
                (0, _) => "ok",
                (_, true) => "FAIL",
                (_, false) => "fail (not guaranteed here)",
            };
            let _ = write!(
                s,
                "  {:<11} {:<5} violations {}",
                c.name, status, c.violations
            );
            if let (Some(i), Some(w)) = (c.witness_index, &c.witness) {
                let ops: Vec<String> = w.iter().map(Dyadic::to_hex).collect();
                let _ = write!(s, "  first #{i}: {}", ops.join(" "));
            }
            s.push('\n');
        }
        let _ = writeln!(s, "{}", if self.passed() { "PASS" } else { "FAIL" });
        s
    }

    fn to_json(&self) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "gating": c.gating,
                    "samples": c.samples,
                    "violations": c.violations,
                    "witness_index": c.witness_index,
                    "witness": c.witness.as_ref().map(|w| w.iter().map(float).collect::<Vec<_>>()),
                })
            })
            .collect();
        json!({
            "backend": self.backend,
            "samples": self.samples,
            "seed": self.seed,
            "passed": self.passed(),
            "checks": checks,
        })
    }

    fn csv_rows(&self) -> (Vec<&'static str>, Vec<Vec<String>>) {
        let header = vec![
            "check",
            "gating",
            "samples",
            "violations",
            "witness_index",
            "witness",
            "backend",
        ];
        let rows = self
            .checks
            .iter()
            .map(|c| {
                vec![
                    c.name.to_string(),
                    c.gating.to_string(),
                    c.samples.to_string(),
                    c.violations.to_string(),
                    c.witness_index.map(|i| i.to_string()).unwrap_or_default(),
                    c.witness
                        .as_ref()
                        .map(|w| w.iter().map(Dyadic::to_hex).collect::<Vec<_>>().join(" "))
                        .unwrap_or_default(),
                    self.backend.clone(),
                ]
            })
            .collect();
        (header, rows)
    }
}

impl Render for BenchReport {
    fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "Time relative to add on {} elements ({:.3?}); {}",
            self.baseline_size, self.baseline, self.timer_note
        );
        let _ = write!(s, "{:>9}", "size");
        for op in &self.ops {
            let _ = write!(s, " {:>8}", op.name());
        }
        s.push('\n');
        for &size in &self.sizes {
            let _ = write!(s, "{size:>9}");
            for &op in &self.ops {
                let ratio = self.cell(size, op).map_or(f64::NAN, |c| c.ratio);
                let _ = write!(s, " {ratio:>8.2}");
            }
            s.push('\n');
        }
        s
    }

    fn to_json(&self) -> Value {
        let cells: Vec<Value> = self
            .cells
            .iter()
            .map(|c| {
                json!({
                    "size": c.size,
                    "op": c.op,
                    "median_ns": c.median.as_nanos() as u64,
                    "ratio": c.ratio,
                })
            })
            .collect();
        json!({
            "sizes": self.sizes,
            "ops": self.ops,
            "reps": self.reps,
            "baseline": { "op": "add", "size": self.baseline_size, "median_ns": self.baseline.as_nanos() as u64 },
            "timer": self.timer_note,
            "cells": cells,
        })
    }

    fn csv_rows(&self) -> (Vec<&'static str>, Vec<Vec<String>>) {
        let header = vec!["size", "op", "median_ns", "ratio"];
        let rows = self
            .cells
            .iter()
            .map(|c| {
                vec![
                    c.size.to_string(),
                    c.op.to_string(),
                    c.median.as_nanos().to_string(),
                    format!("{:.4}", c.ratio),
                ]
            })
            .collect();
        (header, rows)
    }
}
