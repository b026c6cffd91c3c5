//! Library error type.

use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An input was structurally degenerate (duplicate interpolation nodes,
    /// distribution with no usable quantile, empty step vector, ...).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Exact rational evaluation was requested from an oracle that only
    /// supports floating-point evaluation.
    #[error("exact evaluation unavailable: {0}")]
    ExactUnavailable(String),

    /// A tester configuration is outside the regime its guarantees need
    /// in a way that makes the requested operation impossible (not merely
    /// warned about).
    #[error("configuration error: {0}")]
    Config(String),

    /// An experiment config failed schema validation.
    #[error("config schema violation: {0}")]
    Schema(String),

    /// A bounded randomized search failed to produce a certified witness.
    #[error("search failed: {0}")]
    SearchFailed(String),
}
