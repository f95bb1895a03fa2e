use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A point or parameter lies outside the region where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Input violates a documented precondition.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A linear system or factorization is too close to singular to trust.
    #[error("ill-conditioned computation: {0}")]
    Conditioning(String),

    /// The linear constraints admit no solution.
    #[error("infeasible constraints: {0}")]
    Infeasible(String),

    /// The interior-point solver produced neither a primal nor a dual certificate.
    #[error("solver undecided at t = {t}: {detail}")]
    Undecided { t: f64, detail: String },

    /// A search guaranteed to succeed in exact arithmetic found nothing at the
    /// requested resolution.
    #[error("search exhausted at resolution {resolution}: {detail}")]
    ResolutionExhausted { resolution: usize, detail: String },

    /// The requested coordinate direction does not determine the variety.
    #[error("degenerate direction: {0}")]
    DegenerateDirection(String),

    #[error("no samples found: {0}")]
    NoSamples(String),

    /// An internal consistency check on a certificate failed.
    #[error("contract violation: {0}")]
    ContractViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
