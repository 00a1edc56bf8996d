// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("inadmissible parameters: {0}")]
    Admissibility(String),
    #[error("invalid time scale: {0}")]
    Scale(String),
    #[error("degenerate parameters: a = b = 0")]
    Degenerate,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("matrix is numerically singular (condition estimate {cond:.3e})")]
    Singularity { cond: f64 },
    #[error("index out of range: {0}")]
    Index(String),
    #[error("letter not supported here: {0}")]
    UnsupportedLetter(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("generator image left the degree filtration: {0}")]
    Closure(String),
    #[error("tolerance not met: {0}")]
    Tolerance(String),
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Coarse classification used by command-line front ends.
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Resource(_) => ErrorCategory::Resource,
            Error::Syntax { .. }
            | Error::Admissibility(_)
            | Error::Scale(_)
            | Error::Degenerate
            | Error::InvalidArgument(_)
            | Error::Index(_)
            | Error::UnsupportedLetter(_)
            | Error::Arity(_)
            | Error::Io(_) => ErrorCategory::Config,
            _ => ErrorCategory::Numerical,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    Numerical,
    Resource,
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
