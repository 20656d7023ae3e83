use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("kernel order must be at least 1, got {0}")]
    InvalidOrder(u32),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected:?} (width, height), found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("pixel value {value} at index {index} is not a finite intensity in [0, 255]")]
    InvalidPixel { index: usize, value: f64 },

    #[error("quadrature did not converge: achieved error estimate {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("no valid past samples to predict pixel (row {row}, col {col})")]
    PredictionImpossible { row: usize, col: usize },

    #[error("region of interest {roi} does not fit inside a {width}x{height} image")]
    RoiOutOfBounds {
        roi: String,
        width: usize,
        height: usize,
    },

    #[error("metric undefined: {0}")]
    UndefinedMetric(&'static str),

    #[error("image too small: {0}")]
    ImageTooSmall(String),

    #[error("unsupported image format in {path}: {reason}")]
    UnsupportedFormat { path: PathBuf, reason: String },

    #[error("cannot take the logarithm of non-positive error {0}")]
    NonPositiveError(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
