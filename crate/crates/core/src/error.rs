use crate::operator::Basis;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("range error: {0}")]
    Range(String),

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("expected an operator in the {expected} basis, found {found}")]
    Basis { expected: Basis, found: Basis },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("eigensolver failed to converge: {0}")]
    Convergence(String),

    #[error("resolution {n} exceeds the configured limit {max}")]
    ResourceLimit { n: u32, max: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;
