//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by stream, classification and transducer operations.
#[derive(Debug, Error)]
pub enum Error {
    /// A word was used with a morphism or operation over a different alphabet.
    #[error("alphabet mismatch: expected {expected}, got {got}")]
    AlphabetMismatch {
        /// Alphabet the operation expects.
        expected: String,
        /// Alphabet the word is over.
        got: String,
    },

    /// Alphabet or morphism construction violated an invariant.
    #[error("invalid construction: {0}")]
    Construction(String),

    /// The seed letter does not admit a fixed point under the morphism.
    #[error("morphism is not prolongable on seed '{seed}'")]
    NotProlongable {
        /// Display name of the offending seed.
        seed: String,
    },

    /// A stream would have to grow past its scan budget.
    #[error("scan budget exhausted: needed {needed} letters, budget is {budget}")]
    BudgetExceeded {
        /// Letters required by the request.
        needed: usize,
        /// Configured budget.
        budget: usize,
    },

    /// A word is not a factor of the sequence it was looked up in.
    #[error("'{factor}' is not a factor of the sequence")]
    NotAFactor {
        /// Display form of the factor.
        factor: String,
    },

    /// Gap classification only handles factors of length at least two.
    #[error("factor length {len} unsupported: classification needs length >= 2")]
    UnsupportedLength {
        /// Offending length.
        len: usize,
    },

    /// Text input (gap words, transducer files, CLI words) failed to parse.
    #[error("parse error at offset {offset}: {message}")]
    Parse {
        /// Byte or token offset of the failure.
        offset: usize,
        /// What went wrong.
        message: String,
    },

    /// A matching violated one of the non-crossing matching clauses.
    #[error("invalid matching: {0}")]
    InvalidMatching(#[from] crate::matching::MatchingViolation),

    /// A search ran out of its configured bound without success.
    #[error("search exhausted: {0}")]
    Exhausted(String),

    /// Catch-all for argument validation.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
