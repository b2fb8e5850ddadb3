//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse failure class, used by binaries to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad parameters, malformed input content, inconsistent dimensions.
    Config,
    /// Operating-system level read/write failures.
    Io,
    /// Non-finite values produced during training.
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{op}: shape mismatch between {a_rows}x{a_cols} and {b_rows}x{b_cols}")]
    Shape {
        op: &'static str,
        a_rows: usize,
        a_cols: usize,
        b_rows: usize,
        b_cols: usize,
    },
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}:{line}: {message}")]
    Csv {
        path: String,
        line: usize,
        message: String,
    },
    #[error("model file {path}: {message}")]
    Model { path: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    /// Wraps an I/O failure with the path it occurred on.
    pub fn io_context(path: &std::path::Path, err: std::io::Error) -> Self {
        Error::Io(std::io::Error::new(
            err.kind(),
            format!("{}: {err}", path.display()),
        ))
    }

    pub fn shape(op: &'static str, a: (usize, usize), b: (usize, usize)) -> Self {
        Error::Shape {
            op,
            a_rows: a.0,
            a_cols: a.1,
            b_rows: b.0,
            b_cols: b.1,
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Io(_) => ErrorClass::Io,
            Error::Numeric(_) => ErrorClass::Numeric,
            _ => ErrorClass::Config,
        }
    }
}
