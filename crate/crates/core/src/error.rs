use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("column index {index} out of range for {cols} columns")]
    IndexOutOfRange { index: usize, cols: usize },

    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// `A^T r` vanished; the current iterate already solves the normal equations.
    #[error("gradient A^T r is identically zero")]
    AllZeroGradient,

    #[error("column {0} has zero norm")]
    ZeroColumn(usize),

    #[error("matrix is rank deficient (smallest Gram eigenvalue {lambda_min:e})")]
    RankDeficient { lambda_min: f64 },

    #[error("convergence factor {0} lies outside (0, 1)")]
    FactorOutOfRange(f64),

    #[error("not applicable: {0}")]
    NotApplicable(&'static str),

    #[error("trace carries no energy-norm error data")]
    MissingEnergyError,

    #[error("no nonzero vector found in the null space of A^T")]
    NullSpaceEmpty,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported MatrixMarket field `{0}`")]
    UnsupportedField(String),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn file(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::File {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
