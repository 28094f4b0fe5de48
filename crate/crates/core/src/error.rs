use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),

    #[error("{a} is not a unit modulo {n}")]
    NotAUnit { a: u64, n: u64 },

    #[error("the given set is not a subgroup of (Z/{0})^x")]
    NotASubgroup(u64),

    #[error("coset representatives do not form a full transversal")]
    NotATransversal,

    #[error("unsupported conductor {0}: expected 9 or a prime congruent to 1 mod 3")]
    UnsupportedConductor(u64),

    #[error("d = {0} is not a squarefree positive integer")]
    NotSquarefree(u64),

    #[error("gram matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("integral basis enlargement stalled at index {0}")]
    EnlargementFailed(String),

    #[error("unit search reached the cap {0} without finding two independent units")]
    UnitSearchExhausted(f64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("enumeration budget exceeded: {0}")]
    Budget(String),

    #[error("margin not resolvable: {0}")]
    Unresolved(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
