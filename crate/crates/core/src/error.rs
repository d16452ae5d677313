use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("index ({row}, {col}) out of range for a {n_rows}x{n_cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        n_rows: usize,
        n_cols: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("variable {name} has infeasible bounds: lower {lower} > upper {upper}")]
    InfeasibleBounds { name: String, lower: f64, upper: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dual precondition violated: inequality dual {index} = {value} is negative")]
    NegativeDual { index: usize, value: f64 },

    #[error("size {size} exceeds the dense cap of {cap}")]
    UnsupportedSize { size: usize, cap: usize },

    #[error("oracle failure: {0}")]
    Oracle(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
