use thiserror::Error;

/// Errors raised by the simulation library and the CLI front end.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cyclotron frequency is zero; no finite cyclotron orbit exists")]
    ZeroField,

    #[error("invalid time step {0}: must be positive and finite")]
    InvalidStep(f64),

    #[error("bad electron distribution: {0}")]
    BadDistribution(String),

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("parse error at line {line} (key `{key}`): {message}")]
    Parse {
        line: usize,
        key: String,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
