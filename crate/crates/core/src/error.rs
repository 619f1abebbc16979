use thiserror::Error;

/// Errors raised by the measure, fitting and selection routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge after {subdivisions} panels (estimate {estimate}, error {abs_error})")]
    NonConvergence {
        estimate: f64,
        abs_error: f64,
        subdivisions: usize,
    },

    #[error("integrand is not finite at x = {0}")]
    NonFiniteIntegrand(f64),

    #[error("pdf is not strictly monotone; it cannot be inverted")]
    NotInvertible,

    #[error("value {value} is outside the pdf range ({lo}, {hi})")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("push-forward map is inconsistent: {0}")]
    InconsistentMap(String),

    #[error("family `{0}` has no sampler")]
    UnsupportedFamily(String),

    #[error("supports do not intersect")]
    DisjointSupport,

    #[error("support labels differ")]
    SupportMismatch,

    #[error("measure is undefined: {0}")]
    Undefined(String),

    #[error("data must be strictly positive (found {0})")]
    NonPositiveData(f64),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("not enough data: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),

    #[error("empty counts")]
    EmptyCounts,

    #[error("threshold violated: K = {k} is not below r = {r}")]
    ThresholdViolation { k: f64, r: f64 },

    #[error("no valid candidates")]
    NoValidCandidates,

    #[error("reference and candidate kinds differ (continuous vs discrete)")]
    KindMismatch,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
