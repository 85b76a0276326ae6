use thiserror::Error;

use crate::rd_model::ResolutionTier;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A caller-supplied value is malformed or out of its domain.
    #[error("invalid input: {0}")]
    Input(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The least-squares system is numerically singular.
    #[error("ill-conditioned fit (condition number {condition:.3e}): {message}")]
    Conditioning { condition: f64, message: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("insufficient data: need at least {needed} vectors, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("gop {gop}: grid bitrate {bitrate} Mbps lies outside the measured span [{lo}, {hi}]")]
    Coverage {
        gop: String,
        bitrate: f64,
        lo: f64,
        hi: f64,
    },

    #[error("gop {gop}: bitrate {bitrate} Mbps measured twice with different PSNR ({first} vs {second} dB)")]
    Ambiguous {
        gop: String,
        bitrate: f64,
        first: f64,
        second: f64,
    },

    #[error("model error: {0}")]
    Model(String),

    #[error("model has no curves for tier {0}")]
    MissingTier(ResolutionTier),

    /// Two curves are coefficient-wise identical, so every bitrate is an intersection.
    #[error("curves are identical")]
    IdenticalCurves,

    #[error("row {row}: {message}")]
    Row { row: u64, message: String },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("unsupported model schema version {found} (expected {expected})")]
    SchemaVersion { found: String, expected: u32 },
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
