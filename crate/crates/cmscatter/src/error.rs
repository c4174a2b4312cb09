//! Crate-wide error type.

use std::fmt;

/// Errors surfaced by the toolkit.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Invalid construction parameters (grid sizes, tolerances, config values).
    Config(String),
    /// A caller violated an operation contract (inadmissible spectral parameter,
    /// missing precondition).
    Contract(String),
    /// A linear solve failed to converge or exceeded its residual budget.
    Solver(String),
    /// A spectral parameter fell inside the exclusion zone of a detected eigenvalue.
    ExceptionalPoint { lambda: f64, nearest: f64 },
    /// The input is not an eigenfunction (vanishing pairing with the potential).
    NotAnEigenfunction,
    /// Two redundant routes to the same quantity disagreed beyond tolerance.
    Consistency(String),
    /// Richardson extrapolation toward the spectral axis did not settle.
    PoleExtraction(String),
    /// Imaginary part of a quantity that must be real exceeded its budget.
    NumericalHygiene(String),
    /// I/O and parse failures.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(m) => write!(f, "configuration error: {m}"),
            Error::Contract(m) => write!(f, "contract violation: {m}"),
            Error::Solver(m) => write!(f, "solver error: {m}"),
            Error::ExceptionalPoint { lambda, nearest } => write!(
                f,
                "spectral parameter {lambda} lies in the exclusion zone of eigenvalue {nearest}"
            ),
            Error::NotAnEigenfunction => write!(f, "pairing with the potential vanishes"),
            Error::Consistency(m) => write!(f, "consistency error: {m}"),
            Error::PoleExtraction(m) => write!(f, "pole extraction error: {m}"),
            Error::NumericalHygiene(m) => write!(f, "numerical hygiene error: {m}"),
            Error::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
