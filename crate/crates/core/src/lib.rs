//! Float-float arithmetic built from error-free transformations.
//!
//! A float-float is an unevaluated sum `hi + lo` of two single-precision
//! values, giving about 44 significant bits on 24-bit hardware. The crate
//! provides:
//!
//! * [`fpmodel`]: arithmetic backends, namely host `f32` and a bit-exact
//!   simulator with configurable precision, rounding, guard digits and
//!   flush-to-zero, so non-IEEE hardware behavior can be recreated.
//! * [`oracle`]: exact dyadic arithmetic used as ground truth.
//! * [`eft`]: Add12, Split and Mul12 over any backend.
//! * [`ff`]: the [`FloatFloat`](ff::FloatFloat) type with Add22 and Mul22.
//! * [`probe`]: paranoia-style ulp-interval estimation of a backend.
//! * [`harness`]: accuracy measurement, benchmarking, self-test and report
//!   rendering used by the command-line tool.

pub mod eft;
pub mod error;
pub mod ff;
pub mod fpmodel;
pub mod harness;
pub mod oracle;
pub mod probe;

pub use error::{Error, Result};
pub use ff::FloatFloat;
pub use fpmodel::{native_backend, sim_backend, Backend, FpFormat};
pub use oracle::Dyadic;
