//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter failed its validity constraint.
    #[error("invalid parameter `{name}`: {message}")]
    InvalidParameter { name: &'static str, message: String },

    /// Probability mass beyond the retained Fock levels exceeds tolerance.
    #[error("truncation error: tail mass {tail:.3e} beyond n_max = {n_max} exceeds {tolerance:.1e}")]
    Truncation {
        n_max: usize,
        tail: f64,
        tolerance: f64,
    },

    /// Requested Fock levels too close to the truncation boundary.
    #[error("headroom violation: need n_max >= {required}, have {n_max}")]
    Headroom { required: usize, n_max: usize },

    /// Operands live in different Hilbert spaces.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// A gate precondition on the input state was violated.
    #[error("precondition violated: {message} (residual population {residual:.3e})")]
    Precondition { message: String, residual: f64 },

    /// The classical trajectory left the trapping region.
    #[error("ion lost at t = {t:.3e} s: |r| exceeded electrode distance {r_max:.3e} m")]
    IonLost { t: f64, r_max: f64 },

    /// A fit was asked for on data that cannot support it.
    #[error("fit failure: {0}")]
    FitFailure(String),

    /// Least-squares design matrix too ill-conditioned to invert.
    #[error("ill-conditioned system: condition number {condition:.3e} exceeds {limit:.1e}{detail}")]
    IllConditioned {
        condition: f64,
        limit: f64,
        detail: String,
    },

    /// Internal cross-check between two computation routes failed.
    #[error("consistency check failed: {0}")]
    Inconsistent(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            message: message.into(),
        }
    }
}

/// True for finite, strictly positive values (rejects NaN).
pub(crate) fn positive_finite(x: f64) -> bool {
    x > 0.0 && x.is_finite()
}

/// True for finite values >= 0 (rejects NaN).
pub(crate) fn nonnegative_finite(x: f64) -> bool {
    x >= 0.0 && x.is_finite()
}
