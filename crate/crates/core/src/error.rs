use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("pixel {index} has value {value}, expected a finite value >= {floor}")]
    NonPositive { index: usize, value: f64, floor: f64 },

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("frames {first} and {second} overlap at pixel ({x}, {y})")]
    LayoutOverlap {
        first: u32,
        second: u32,
        x: usize,
        y: usize,
    },

    #[error("pixel ({x}, {y}) is not covered by any frame")]
    LayoutCoverage { x: usize, y: usize },

    #[error("frame {id} is empty or extends outside the {width}x{height} canvas")]
    LayoutBounds { id: u32, width: usize, height: usize },

    #[error("frame id {0} appears more than once")]
    LayoutDuplicateId(u32),

    #[error("operator kind {0} cannot be factored as a tridiagonal system")]
    NotSplit(&'static str),

    #[error("zero pivot on line {line} (row {row} of the line system)")]
    ZeroPivot { line: usize, row: usize },

    #[error("non-finite state detected after iteration {iter}")]
    NonFinite { iter: usize },

    #[error("dense oracle limited to {max}x{max} grids, got {width}x{height}")]
    OracleTooLarge { width: usize, height: usize, max: usize },

    #[error("unknown scheme '{name}' (available: {available})")]
    UnknownScheme { name: String, available: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("calibration constants must be positive: {0}")]
    Calibration(String),

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("failed to decode {path}: {reason}")]
    Decode { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Shape mismatch between two `width x height` grids.
    pub fn shape(expected: (usize, usize), found: (usize, usize)) -> Self {
        Error::ShapeMismatch {
            expected: format!("{}x{}", expected.0, expected.1),
            found: format!("{}x{}", found.0, found.1),
        }
    }
}
