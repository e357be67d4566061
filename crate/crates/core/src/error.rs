use thiserror::Error;

/// Errors raised by the demosaicking library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid polarizer angle {0}; expected one of 0, 45, 90, 135")]
    InvalidAngle(i64),

    #[error("invalid PFA pattern: {0}")]
    InvalidPattern(String),

    #[error("invalid image dimensions {width}x{height}: {reason}")]
    InvalidDimensions {
        width: usize,
        height: usize,
        reason: &'static str,
    },

    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },

    #[error("non-finite sample at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("negative sample {value} at row {row}, column {col}")]
    NegativeSample { row: usize, col: usize, value: f64 },

    #[error("index ({row}, {col}) lies outside the {apron}-pixel border apron")]
    OutsideApron {
        row: isize,
        col: isize,
        apron: usize,
    },

    #[error("unsupported bit depth {0}; expected 1..=16")]
    InvalidBitDepth(u8),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
