use std::fmt;

use thiserror::Error;

/// Why a context was refused by the classification pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Refusal {
    NotWeil,
    NotOrdinary,
    NotIrreducible,
}

impl fmt::Display for Refusal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Refusal::NotWeil => "not a Weil polynomial",
            Refusal::NotOrdinary => "not ordinary",
            Refusal::NotIrreducible => "not irreducible",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("wrong degree: expected {expected}, found {found}")]
    WrongDegree { expected: usize, found: usize },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("degenerate lattice")]
    DegenerateLattice,
    #[error("not an order generator")]
    NotOrderGenerator,
    #[error("not a Z[α]-module")]
    NotAlphaStable,
    #[error("not in M_{{n,f}}")]
    CharpolyMismatch,
    #[error("zero vector")]
    ZeroVector,
    #[error("division by zero")]
    DivisionByZero,
    #[error("not a divisor of the point count")]
    NotPointCountDivisor,
    #[error("capability error: {0}")]
    Capability(String),
    #[error("refused: {0}")]
    Refused(Refusal),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("network error: {0}")]
    Network(String),
}

impl Error {
    /// Stable machine-readable code for the error kind.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotMonic => "not_monic",
            Error::WrongDegree { .. } => "wrong_degree",
            Error::NotPrime(_) => "not_prime",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::DegenerateLattice => "degenerate_lattice",
            Error::NotOrderGenerator => "not_order_generator",
            Error::NotAlphaStable => "not_alpha_stable",
            Error::CharpolyMismatch => "charpoly_mismatch",
            Error::ZeroVector => "zero_vector",
            Error::DivisionByZero => "division_by_zero",
            Error::NotPointCountDivisor => "not_point_count_divisor",
            Error::Capability(_) => "capability",
            Error::Refused(Refusal::NotWeil) => "refused_not_weil",
            Error::Refused(Refusal::NotOrdinary) => "refused_not_ordinary",
            Error::Refused(Refusal::NotIrreducible) => "refused_not_irreducible",
            Error::Internal(_) => "internal",
            Error::Io(_) => "io",
            Error::Parse(_) => "parse",
            Error::Network(_) => "network",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
