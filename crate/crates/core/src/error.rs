use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown lattice name `{0}`")]
    UnknownLattice(String),

    #[error("invalid parameters for {what}: {condition}")]
    InvalidParams { what: String, condition: String },

    #[error("Gram matrix is not symmetric")]
    NotSymmetric,

    #[error("Gram matrix has an odd diagonal entry at position {0}")]
    NotEven(usize),

    #[error("Gram matrix is singular")]
    Singular,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("discriminant group of order {order} exceeds the cap {cap}")]
    CapExceeded { order: String, cap: u64 },

    #[error("enumeration requires definite lattice")]
    Indefinite,

    #[error("vector is not in the dual lattice")]
    NotInDual,

    #[error("vectors belong to different ambient lattices")]
    MixedLattices,

    #[error("{0}")]
    Precondition(String),

    #[error("no primitive vector of norm {norm} within coordinate radius {radius}")]
    NoPrimitiveVector { norm: String, radius: i64 },

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

pub(crate) fn invalid(what: impl Into<String>, condition: impl Into<String>) -> Error {
    Error::InvalidParams {
        what: what.into(),
        condition: condition.into(),
    }
}
