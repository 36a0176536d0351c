use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("grid mismatch between fields")]
    GridMismatch,

    #[error("dft: {0}")]
    Dft(String),

    #[error("stability: {0}")]
    Stability(String),

    #[error("operator order: {0}")]
    Order(String),

    #[error("domain: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error at {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub(crate) fn check_len(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::LengthMismatch { left, right });
    }
    Ok(())
}
