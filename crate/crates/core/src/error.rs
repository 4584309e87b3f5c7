use thiserror::Error;

/// Errors produced by the library.
///
/// Oracle verdicts that cannot be decided numerically are not errors; they
/// surface as [`crate::Truth::Undecided`] instead.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("cone not pointed: dual functionals have rank {rank} < {dim}")]
    NotPointed { rank: usize, dim: usize },

    #[error("cone not generating: no interior point exists")]
    NotGenerating,

    #[error("space `{0}` is not cover certified; canonicalize it first or use the definitional oracle")]
    NotCoverCertified(String),

    #[error("{what}: {count} exceeds the limit of {limit}; use sampled mode instead")]
    TooLarge {
        what: &'static str,
        count: usize,
        limit: usize,
    },

    #[error("space is not a lattice (canonical rows {rows} != dimension {dim})")]
    NotLattice { rows: usize, dim: usize },

    #[error("resolvent does not exist at lambda = {lambda}: {reason}")]
    Resolvent { lambda: f64, reason: String },

    #[error("matrix is singular or ill-conditioned: {0}")]
    Singular(String),

    #[error("overflow in matrix exponential (norm {norm:.3e}); reduce |t| or rescale the generator")]
    Overflow { norm: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
