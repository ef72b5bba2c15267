//! Error type shared across the library.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by evaluators, bound checks, and the sweep engine.
///
/// The CLI maps these onto its exit-code table: `Parse`/`Config` -> 2,
/// `Domain`/`Pole` -> 3, `Io` -> 4.
#[derive(Debug, Error)]
pub enum Error {
    /// Input lies outside the stated domain of an operation
    /// (e.g. a bound evaluated at an `alpha` its inequality does not cover).
    #[error("domain violation: {0}")]
    Domain(String),

    /// A denominator Pochhammer factor vanishes for a reachable summation index.
    #[error("pole: {0}")]
    Pole(String),

    /// An infinite series was requested without a truncation cap.
    #[error("missing truncation cap: {0}")]
    MissingTruncation(String),

    /// A configured safety cap (exact-path degree, series cap) was exceeded.
    #[error("cap exceeded: {0}")]
    CapExceeded(String),

    /// Malformed textual input (rational literals, CLI values, sweep configs).
    #[error("parse error: {0}")]
    Parse(String),

    /// Not enough data points for a statistical fit.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// I/O failure, annotated with the path involved.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
