use thiserror::Error;

/// Errors produced by coefficient generation, grid operators and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("window length {got} does not match stencil length {expected}")]
    WindowLength { expected: usize, got: usize },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: i64, len: usize },

    #[error("axis {axis} has {available} samples but {required} are required (margin {margin} per side)")]
    InsufficientSamples {
        axis: usize,
        available: usize,
        required: usize,
        margin: usize,
    },

    #[error("q mismatch: field carries q = {field}, operator expects q = {expected}")]
    QMismatch { field: u32, expected: u32 },

    #[error("point {0:?} lies outside the valid evaluation box")]
    OutsideDomain(Vec<f64>),

    #[error("non-finite integrand value at x = {0}")]
    NonFinite(f64),

    #[error("singular linear system")]
    Singular,

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
