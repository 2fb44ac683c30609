use thiserror::Error;

/// Errors raised by the simulator and the analytical calculators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("operation requires a {expected}-D realization, got {actual}-D")]
    DimensionMismatch { expected: u8, actual: u8 },

    #[error("realization has no node at the origin")]
    MissingSource,

    #[error("realization needs at least two nodes")]
    TooFewNodes,

    #[error("window half-width {extent} does not cover level {level} (needs {required})")]
    WindowTooSmall { extent: f64, level: u64, required: f64 },

    #[error("theorem inapplicable: {0}")]
    Inapplicable(String),

    #[error("truncation level K={k} too small: tail correction {tail_correction} is not positive (need K >= {suggested})")]
    TruncationTooShort { k: u64, tail_correction: f64, suggested: u64 },

    #[error("quadrature did not converge: estimated error {error:e} exceeds tolerance {tolerance:e}")]
    Quadrature { error: f64, tolerance: f64 },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
