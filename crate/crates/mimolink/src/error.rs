//! Error type shared across the simulator.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates a documented constraint.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Grid or buffer dimensions do not line up.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A throughput average was requested over a window with no allocation.
    #[error("undefined average: every subframe in the window carries zero transport-block bits")]
    UndefinedAverage,

    /// Unknown figure preset name.
    #[error("unknown preset '{0}'; valid presets: {1}")]
    UnknownPreset(String, String),

    /// Configuration file problem (parse or constraint violation).
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
