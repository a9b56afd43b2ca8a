use thiserror::Error;

/// Errors raised by the arithmetic models, the oracle and the harness.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("result overflows the exponent range of the format")]
    Overflow,
    #[error("value underflows the normal range")]
    Underflow,
    #[error("division by zero")]
    DivideByZero,
    #[error("ulp is undefined for zero")]
    ZeroArgument,
    #[error("computed and exact values are both zero")]
    BothZero,
    #[error("relative error is undefined for an exact value of zero")]
    ExactIsZero,
    #[error("split constant (2^{s_point} + 1) * a would overflow")]
    SplitOverflow { s_point: u32 },
    #[error("splitting point {s_point} outside [p/2, p-1] for p = {precision}")]
    InvalidSplitPoint { s_point: u32, precision: u32 },
    #[error("precision {0} is too small for this transformation")]
    PrecisionTooSmall(u32),
    #[error("partial product a_lo * b_lo falls below the normal range")]
    UnderflowRisk,
    #[error("invalid format: {0}")]
    InvalidFormat(String),
    #[error("unknown operation `{0}`")]
    UnknownOp(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
