//! Crate-wide error type.

/// Errors produced by code construction, counting, and simulation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A degree distribution failed validation (empty, negative mass,
    /// masses not summing to one, ...).
    #[error("invalid degree spec: {0}")]
    InvalidSpec(String),

    /// A size guard was violated (exhaustive enumeration limits and the
    /// like). The message names the specific limit.
    #[error("guard violated: {0}")]
    Guard(String),

    /// A vector or pattern had the wrong length for the code at hand.
    #[error("{what}: length {got}, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },

    /// An index was outside `[0, size)`.
    #[error("{what}: index {index} out of range for size {size}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        size: usize,
    },

    /// An ensemble exponent (`rho_i * n`, `lambda_j * k`, or an edge
    /// total) was not within `1e-9` of an integer.
    #[error("{what} = {value} is not within 1e-9 of an integer")]
    NonIntegralExponent { what: &'static str, value: String },

    /// An operation needed an input-node degree description but the spec
    /// carries neither `lambda` nor a constant row weight.
    #[error("input degree information required: provide lambda or row_weight")]
    MissingInputSpec,

    /// Stopping-set queries reject the empty subset.
    #[error("empty subset")]
    EmptySubset,

    /// A string could not be parsed as an exact rational.
    #[error("cannot parse {0:?} as a rational number")]
    ParseRational(String),

    /// Malformed structured input (JSON files, CLI values).
    #[error("malformed input: {0}")]
    Malformed(String),

    /// Two artifacts that must agree (code/pattern, analytical/empirical
    /// runs) did not.
    #[error("mismatched parameters: {0}")]
    Mismatch(String),

    /// A numeric argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
