use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain mismatch: codomain of the inner function is {found}, expected {expected}")]
    DomainMismatch { expected: String, found: String },

    #[error("codomain mismatch: {0} vs {1}")]
    CodomainMismatch(String, String),

    #[error("size limit exceeded: the set would have {size} elements (limit {limit})")]
    SizeLimitExceeded { size: u128, limit: u64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("the images are disjoint; nonempty intersection is required")]
    EmptyIntersection,

    #[error("the two coalgebras are for different functors")]
    FunctorMismatch,

    #[error("F applied to the empty set is empty; no base point exists")]
    EmptyFZero,

    #[error("parameter {value} exceeds the configured bound {bound}")]
    BoundExceeded { value: u64, bound: u64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("invalid action: {0}")]
    InvalidAction(String),

    #[error("invalid coalgebra: {0}")]
    InvalidCoalgebra(String),

    #[error("function is not injective: {0}")]
    NotInjective(String),

    #[error("unknown state: {0}")]
    UnknownState(String),
}

pub type Result<T> = std::result::Result<T, Error>;
