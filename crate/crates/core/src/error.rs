use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is singular and does not span a lattice")]
    Singular,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("tuple {given:?} is not canonical (canonical form is {canonical:?})")]
    NotCanonical { given: [i64; 6], canonical: [i64; 6] },
    #[error("invalid invariant tuple: {0}")]
    InvalidTuple(String),
    #[error("consistency check failed in invariant computation: {0}")]
    Internal(String),
    #[error("working precision {precision} too small, need at least {required}")]
    Precision { precision: u32, required: u32 },
    #[error("Frobenius action is only defined on conductor-0 invariants, got conductor {0}")]
    NonzeroConductor(i64),
    #[error("unknown Hecke generator `{0}`")]
    UnknownGenerator(String),
    #[error("incidence error: {0}")]
    Incidence(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
