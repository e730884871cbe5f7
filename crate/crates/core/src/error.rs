use thiserror::Error;

pub type Result<T> = std::result::Result<T, SosError>;

/// Best point reached by an iterative fit that failed to converge.
#[derive(Debug, Clone, PartialEq)]
pub struct BestPoint {
    pub beta: f64,
    pub sigma: f64,
    pub a: f64,
    pub loglik: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SosError {
    #[error("sample is empty")]
    EmptySample,

    /// `index` is 1-based, matching line/position numbering shown to users.
    #[error("failure time at position {index} is not positive ({value})")]
    NonPositiveTime { index: usize, value: f64 },

    #[error("failure time at position {index} is not finite")]
    NonFiniteTime { index: usize },

    #[error("observed failures r={r} exceed system size n={n}")]
    CountExceedsSize { r: usize, n: usize },

    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid multiplier scheme: {0}")]
    InvalidScheme(String),

    #[error("model is not identifiable with r={r} observed failures (need r >= 2)")]
    Unidentifiable { r: usize },

    #[error("solver did not converge after {iterations} iterations: {reason}")]
    NonConvergent {
        iterations: usize,
        reason: String,
        best: Option<BestPoint>,
    },

    #[error("information matrix is singular (determinant {determinant:e})")]
    Singular {
        determinant: f64,
        matrix: Vec<Vec<f64>>,
    },

    #[error("information matrix is not positive definite: variance entry for {param} is {value}")]
    NotPositiveDefinite { param: String, value: f64 },

    #[error("{failed} of {total} Monte Carlo replicates failed to fit (limit is 1%)")]
    TooManyFailures { failed: usize, total: usize },

    #[error("invalid study configuration: {0}")]
    Config(String),
}

impl SosError {
    /// True for errors caused by bad input rather than a numerical breakdown.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            SosError::EmptySample
                | SosError::NonPositiveTime { .. }
                | SosError::NonFiniteTime { .. }
                | SosError::CountExceedsSize { .. }
                | SosError::InvalidParameter { .. }
                | SosError::Domain(_)
                | SosError::InvalidScheme(_)
                | SosError::Config(_)
        )
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(SosError::InvalidParameter { name, value })
    }
}
