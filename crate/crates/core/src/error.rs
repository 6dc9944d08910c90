use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("product has an imaginary phase")]
    ImaginaryPhase,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("group is not abelian")]
    NonAbelian,
    #[error("-1 is in the stabilizer group")]
    MinusIdentity,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("invalid colex: {0}")]
    InvalidColex(String),
    #[error("model inconsistency: {0}")]
    Inconsistent(String),
    #[error("too large for exhaustive method: {0}")]
    TooLarge(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
