use std::io;

use thiserror::Error;

use crate::types::LinearModel;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid plane: {0}")]
    InvalidPlane(String),
    #[error("invalid block geometry: {0}")]
    InvalidGeometry(String),
    #[error("bad YUV spec: {0}")]
    BadSpec(String),
    #[error("truncated file: need {needed} bytes, have {available}")]
    TruncatedFile { needed: u64, available: u64 },
    #[error("frame index {index} out of range (frame count {count})")]
    OutOfRange { index: usize, count: usize },
    #[error("sample value {value} does not fit in {bit_depth} bits")]
    SampleRange { value: u32, bit_depth: u8 },
    #[error("no reference samples available")]
    NoReference,
    #[error("outside plane: {0}")]
    OutOfPlane(String),
    /// The luma spread of the reference pairs is zero. `fallback` is the
    /// flat model (alpha = 0) the caller should use instead.
    #[error("degenerate luma: all reference luma values are equal")]
    DegenerateLuma { fallback: LinearModel },
    #[error("too few pairs: {0}")]
    TooFewPairs(String),
    #[error("too few samples after sub-sampling with s = {s}")]
    TooFewSamples { s: u32 },
    #[error("zero variance")]
    ZeroVariance,
    #[error("anchor residual energy is zero")]
    ZeroAnchor,
    #[error("reduction base is zero")]
    ZeroBase,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("csv record columns do not match header: {0}")]
    ColumnMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by the environment (files, streams) rather
    /// than by arguments.
    pub fn is_io(&self) -> bool {
        matches!(
            self,
            Error::Io(_) | Error::Csv(_) | Error::TruncatedFile { .. }
        )
    }
}
