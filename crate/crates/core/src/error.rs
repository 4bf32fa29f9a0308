use thiserror::Error;

use crate::shape::SymmetryPlane;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degree must be >= 3, got {0}")]
    DegreeTooLow(i64),
    #[error("degree {degree} exceeds the supported maximum {max}")]
    DegreeTooHigh { degree: u32, max: u32 },
    #[error("omega must be >= 0, got {0}")]
    NegativeOmega(f64),
    #[error("parameter must be finite, got {0}")]
    NonFinite(f64),
    #[error("index k={k} out of range for n={n} (need 2k+1 <= n+1)")]
    OutOfRange { n: u32, k: u32 },
    #[error("symmetry plane {plane} is not expected for degree {degree}")]
    ClassMismatch { degree: u32, plane: SymmetryPlane },
    #[error("invalid parameter domain: {0}")]
    InvalidDomain(String),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
