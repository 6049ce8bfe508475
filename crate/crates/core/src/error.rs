use thiserror::Error;

/// Errors raised by the estimators, the limit-law simulators and the
/// experiment harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty sample")]
    EmptySample,

    #[error("negative value at index {0}")]
    NegativeValue(usize),

    #[error("non-finite value at index {0}")]
    NonFiniteValue(usize),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("vertices must have strictly increasing x and nondecreasing y (violated at index {0})")]
    UnsortedVertices(usize),

    #[error("vertices must start at (0, 0)")]
    MissingOrigin,

    #[error("evaluation point must be nonnegative, got {0}")]
    NegativeAbscissa(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sample of size {n} too small, need at least {min}")]
    SampleTooSmall { n: usize, min: usize },

    #[error("order statistic index {m} out of range 1..={n}")]
    OrderStatOutOfRange { m: usize, n: usize },

    #[error("degenerate estimate: {0}")]
    Degenerate(String),

    #[error("observation {max} exceeds support upper bound {upper}")]
    OutsideSupport { max: f64, upper: f64 },

    #[error("solver did not converge (achieved tolerance {0:e})")]
    NoConvergence(f64),

    #[error("minimum at grid boundary (c = {0}); widen the grid")]
    GridBoundary(f64),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
