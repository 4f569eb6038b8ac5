use thiserror::Error;

/// Errors surfaced by the library.
///
/// The last five variants are internal-invariant violations: if one of them
/// ever fires, the engine has produced something the ring axioms forbid and
/// no downstream result can be trusted.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("size guard: {0}")]
    SizeGuard(String),

    #[error("polynomial has a negative exponent; constant term is undefined")]
    NotLaurentFree,

    #[error("cache rejected: {0}")]
    CacheFormat(String),

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("Monk system at n={n}, degree {degree} is rank-deficient at column {column}")]
    RankDeficient {
        n: usize,
        degree: usize,
        column: String,
    },

    #[error("non-integral solve result at n={n}, degree {degree}: {detail}")]
    NonIntegral {
        n: usize,
        degree: usize,
        detail: String,
    },

    #[error("negative structure coefficient in {context}")]
    NegativeCoefficient { context: String },

    #[error("Laurent exponent leaked into a ring element in {context}")]
    LaurentLeak { context: String },

    #[error("nonzero consistency residual at n={n}, degree {degree}, row {row}")]
    ConsistencyResidual { n: usize, degree: usize, row: usize },

    #[error("product class for {context} is not homogeneous in the length grading")]
    Inhomogeneous { context: String },
}

impl Error {
    /// True for the variants that signal a broken internal invariant rather
    /// than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::RankDeficient { .. }
                | Error::NonIntegral { .. }
                | Error::NegativeCoefficient { .. }
                | Error::LaurentLeak { .. }
                | Error::ConsistencyResidual { .. }
                | Error::Inhomogeneous { .. }
                | Error::Calibration(_)
        )
    }
}
