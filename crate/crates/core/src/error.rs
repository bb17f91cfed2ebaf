//! Error type shared by the whole crate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid grid construction parameters.
    #[error("invalid grid: {0}")]
    Grid(String),

    /// Non-finite or otherwise unusable ray parameters.
    #[error("invalid ray: {0}")]
    Ray(String),

    /// Invalid beam specification (bad source distance, out-of-field ray, ...).
    #[error("invalid beam: {0}")]
    Beam(String),

    /// Index outside the grid.
    #[error("index out of bounds: {0}")]
    Bounds(String),

    /// Mismatched shapes, lengths, or grids between operands.
    #[error("mismatch: {0}")]
    Mismatch(String),

    /// Malformed ray-set configuration text.
    #[error("config line {line}: {reason}")]
    Config { line: usize, reason: String },

    /// Malformed binary file content, located by byte offset.
    #[error("{kind} file: {reason} (byte offset {offset})")]
    Format {
        kind: &'static str,
        offset: u64,
        reason: String,
    },

    /// Underlying read/write failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
