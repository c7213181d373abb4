//! Error type shared across the toolkit.

/// Errors produced by the threshold computations and the null-space verifier.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A quadrature specification violated its invariants.
    #[error("invalid quadrature spec: {0}")]
    Quadrature(String),

    /// The inner maximization has no finite value (requires gamma > 0).
    #[error("unbounded objective: gamma must be positive, got {0}")]
    Unbounded(f64),

    /// The dual minimization failed to locate a finite minimum.
    #[error("optimization failure: {0}")]
    OptimizationFailure(String),

    /// A requested value lies outside the representable range of the curve.
    #[error("range error: {0}")]
    Range(String),

    /// A sampled or supplied problem instance is unusable.
    #[error("degenerate instance: {0}")]
    DegenerateInstance(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
