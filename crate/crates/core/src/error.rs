//! Error type shared by the whole crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// A sequence that must be a permutation of 0..m is not.
    #[error("invalid ranking: {0}")]
    InvalidRanking(String),

    /// An election must contain at least one vote.
    #[error("empty election")]
    EmptyElection,

    /// A group-separable tree failed structural validation.
    #[error("invalid tree: {0}")]
    InvalidTree(String),

    /// Stratification and antagonism matrices exist only for even dimensions.
    #[error("{what} is undefined for odd dimension m={m}")]
    OddDimension { what: &'static str, m: usize },

    /// A numeric parameter fell outside its admissible range.
    #[error("parameter {name}={value} outside [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    /// A vector or matrix is not a (bi)stochastic object within tolerance.
    #[error("not stochastic: {0}")]
    NotStochastic(String),

    /// An operation refused to run past its documented size cap.
    #[error("{what} supports m <= {cap}, got m={m}; {hint}")]
    ResourceLimit {
        what: &'static str,
        cap: usize,
        m: usize,
        hint: &'static str,
    },

    /// A model specification is internally inconsistent.
    #[error("invalid model spec: {0}")]
    InvalidSpec(String),

    /// Input file could not be parsed; `line` is 1-based.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// The file is valid preference data but uses features we do not support.
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    /// A misrepresentation ratio was requested for a zero-distance pair.
    #[error("undefined ratio: positionwise distance between {0} and {1} is zero")]
    UndefinedRatio(String, String),

    /// A label was not found in an embedding layout.
    #[error("unknown label: {0}")]
    UnknownLabel(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
