use thiserror::Error;

/// Errors raised by the fpsearch library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("Chebyshev evaluation overflowed: T_{order}({x})")]
    Overflow { order: usize, x: f64 },

    #[error("operation requires a schedule in {expected} mode")]
    ModeMismatch { expected: &'static str },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid problem instance: {0}")]
    InvalidInstance(String),

    #[error("ancilla leak {leak:e} exceeds bound {bound:e}")]
    AncillaLeak { leak: f64, bound: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
