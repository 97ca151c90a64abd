//! Crate-wide error type.
//!
//! Variants map one-to-one onto the CLI exit-code contract: configuration,
//! usage and domain errors exit with 2, I/O errors with 3. Verification
//! failures are not errors; they are reported results with exit code 1.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid build-time configuration (jet order out of range, bad degree).
    #[error("configuration error: {0}")]
    Config(String),

    /// API misuse: mismatched operands, unknown surface names, bad flags.
    #[error("usage error: {0}")]
    Usage(String),

    /// Point outside the valid chart region, or a degenerate induced metric.
    #[error("domain error: {0}")]
    Domain(String),

    /// Division by a zero-valued jet, sqrt of a nonpositive value, 1/sqrt(S)
    /// at S = 0.
    #[error("singularity: {0}")]
    Singularity(String),

    /// Report serialization or file I/O failed.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
