use std::path::PathBuf;

use thiserror::Error;

/// Unified error type for the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// Two signatures (or a signature and a library) disagree on length.
    #[error("signature length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// Two signatures disagree on the level bound.
    #[error("level bound mismatch: vmax {left} vs {right}")]
    VmaxMismatch { left: u16, right: u16 },

    /// A signature value exceeds its declared level bound.
    #[error("value {value} at index {index} exceeds level bound {vmax}")]
    ValueOutOfRange { index: usize, value: u16, vmax: u16 },

    /// A raw feature is NaN or infinite.
    #[error("non-finite feature at index {index}")]
    NonFiniteFeature { index: usize },

    /// Invalid configuration: bad threshold, empty candidate list, impossible
    /// synthesis request, and similar.
    #[error("configuration error: {0}")]
    Config(String),

    /// Per-channel data problem during feature extraction.
    #[error("data error in channel {channel}: {message}")]
    Data { channel: usize, message: String },

    /// Filesystem problem.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A file that could not be parsed at all.
    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },

    /// Malformed JSON (library files, probe inputs, report serialization).
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
