use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix is not symmetric positive definite")]
    NotSpd,

    #[error("degenerate covariance: minimum eigenvalue {0:e} below threshold")]
    DegenerateCovariance(f64),

    #[error("tolerance not reached: {0}")]
    ToleranceNotReached(String),

    #[error("root is not bracketed: f(lo) = {f_lo:e}, f(hi) = {f_hi:e}")]
    NoBracket { f_lo: f64, f_hi: f64 },

    #[error("escort with beta = 0 needs a support of finite measure")]
    InfiniteSupport,

    #[error("unsupported alpha {0} (closed forms exist for alpha in {{1, 2}})")]
    UnsupportedAlpha(f64),

    #[error("linear system is singular")]
    SingularSystem,

    #[error("input too large for exhaustive enumeration: {0} entries (max 20)")]
    TooLarge(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
