use thiserror::Error;

/// Errors produced by the evaluators and their kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument violates the function's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The result is not representable as a finite `f64`.
    #[error("overflow: {0}")]
    Overflow(String),

    /// A series hit its term cap before its error bound fell below the target.
    #[error("no convergence after {terms} terms: bound {bound:e} exceeds target {target:e}")]
    NonConvergence { terms: usize, bound: f64, target: f64 },

    /// Arguments lie where double precision cancellation makes the series unreliable.
    #[error("ill-conditioned regime ({0}); use quadrature instead")]
    IllConditioned(String),

    /// The a-priori term count for the requested accuracy exceeds the cap.
    #[error("requested accuracy needs about {required:e} terms, cap is {cap}")]
    Infeasible { required: f64, cap: usize },

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature tolerance not met: estimated error {estimate:e} > {tol:e}")]
    ToleranceNotMet { estimate: f64, tol: f64 },

    /// A computed probability fell outside [0, 1] by more than its error bound.
    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
