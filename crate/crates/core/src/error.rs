use thiserror::Error;

use crate::scalar::Domain;

#[derive(Debug, Error)]
pub enum Error {
    #[error("order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),

    #[error("domain mismatch: {0} vs {1}")]
    DomainMismatch(Domain, Domain),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid grouping: {0}")]
    InvalidGrouping(String),

    #[error("invalid flattening: {0}")]
    InvalidFlattening(String),

    #[error("operation not supported over the {0} domain")]
    UnsupportedDomain(Domain),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("not a hypergraph homomorphism: {0}")]
    NotHomomorphism(String),

    #[error("too large: {0}")]
    TooLarge(String),

    #[error("unknown catalog id `{0}`")]
    UnknownId(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
