//! Arithmetic backends: host binary32 and a configurable software simulator
//! with selectable rounding, guard digits and flush-to-zero.

mod backend;
mod format;
pub mod sim;

pub use backend::{native_backend, sim_backend, Backend, Native, Sim};
pub use format::{FpFormat, GuardDigits, Preset, Rounding};
pub use sim::{add, div, from_parts, mul, reciprocal, round, sub, ulp, Class, SimFloat};
