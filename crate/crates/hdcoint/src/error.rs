//! Crate-wide error type.
//!
//! Errors split into two families that the CLI maps to distinct exit codes:
//! validation errors (caller passed inconsistent parameters or malformed
//! input; exit code 2) and numeric-domain errors (parameters are well-formed
//! but outside the regime where the computation is defined, or a numerical
//! factorization failed; exit code 3).

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All errors produced by this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter failed validation (wrong shape, wrong range, inconsistent
    /// with other parameters).
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// The sample is too short for the requested lag order: the sequential
    /// correlation spectra are only defined (and only meaningful) when
    /// `T > (k+1) N`.
    #[error("sample too short: T = {t} must exceed (k+1)N = {min} for k = {k}, N = {n}")]
    SampleTooShort { t: usize, n: usize, k: usize, min: usize },

    /// A quantity left the domain where the computation is defined
    /// (e.g. a shape parameter at or below its lower bound).
    #[error("out of domain: {0}")]
    OutOfDomain(String),

    /// A dense factorization or iterative solve failed to converge.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// A data cell in an ingested file is missing or not numeric.
    #[error("bad data cell at row {row}, column {col}: {reason}")]
    BadCell { row: usize, col: usize, reason: String },

    /// A quantile table does not cover the requested (r, alpha) entry.
    #[error(
        "quantile table has no entry for r = {r}, alpha = {alpha}; \
         generate a covering table with `airy_sum_quantiles`"
    )]
    MissingQuantile { r: usize, alpha: f64 },

    /// Underlying I/O error.
    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// CSV (de)serialization error.
    #[error(transparent)]
    Csv(#[from] csv::Error),

    /// JSON (de)serialization error.
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code the CLI should use for this error: 2 for validation
    /// and input problems, 3 for numeric-domain failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParam(_)
            | Error::BadCell { .. }
            | Error::MissingQuantile { .. }
            | Error::Io(_)
            | Error::Csv(_)
            | Error::Json(_) => 2,
            Error::SampleTooShort { .. } | Error::OutOfDomain(_) | Error::NumericalFailure(_) => 3,
        }
    }
}
