use thiserror::Error;

/// Errors raised by the numerical kernels and the certification pipeline.
///
/// Infinite functionals are not errors: a divergent `V_p` or an infinite
/// constant is reported as `f64::INFINITY`.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {t} lies outside the weight's domain")]
    OutOfDomain { t: f64 },

    #[error("weight evaluated to non-positive value {value} at t = {t}")]
    NonPositive { t: f64, value: f64 },

    #[error("integral over ({x}, {y}) diverges")]
    Divergent { x: f64, y: f64 },

    #[error("adaptive refinement exceeded depth {depth} on ({x}, {y})")]
    DepthExceeded { x: f64, y: f64, depth: usize },

    #[error("tail integral W is degenerate: {0}")]
    DegenerateW(String),

    #[error("bisection failed for level k = {k}: {reason}")]
    BisectionFailure { k: i64, reason: String },

    #[error("sequence lengths differ: {left} vs {right}")]
    IndexMismatch { left: usize, right: usize },

    #[error("empty index range")]
    EmptyRange,

    #[error("p = {p} < 1: the inequality only holds for the zero function")]
    TrivialRegime { p: f64 },

    #[error("candidate function is identically zero")]
    ZeroFunction,

    #[error("monotone parametrizations disagree: step {step:.6e} vs substitution {substitution:.6e}")]
    InconsistentParametrizations { step: f64, substitution: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("schema error at `{key}`: {message}")]
    Schema { key: String, message: String },

    #[error("range error: {0}")]
    Range(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
