use thiserror::Error;

/// Errors surfaced by the numerical core and fitters.
///
/// Fit non-convergence is deliberately NOT an error: fitters return a
/// [`crate::fit::FitResult`] with `converged == false` so the Monte Carlo
/// harness can count failures instead of aborting a run.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix is not symmetric within tolerance")]
    NotSymmetric,

    #[error("matrix is not positive definite (leading minor {0})")]
    NotPositiveDefinite(usize),

    #[error("invalid dataset: {0}")]
    InvalidData(String),

    #[error("rank-deficient design: {0}")]
    RankDeficient(String),

    #[error("proportional effect undefined: |control mean| = {0:.3e} at t = {1}")]
    UndefinedRatio(f64, f64),

    #[error("unknown scenario label: {0}")]
    UnknownScenario(String),
}

pub type Result<T> = std::result::Result<T, Error>;
