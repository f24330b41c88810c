use alloc::string::String;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Malformed bracketing or record syntax; `offset` is a character offset into the input.
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("format error: {0}")]
    Format(String),

    /// Structurally well-formed input that violates a data invariant.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// An input for which no graph can be built (an empty partition).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("integrity error: {0}")]
    Integrity(String),

    /// The exhaustive oracle refuses instances above its cell budget.
    #[error("oracle refused: {cells} cells exceeds the limit of {limit}")]
    OracleRefused { cells: usize, limit: usize },

    /// A pipeline prerequisite (tree, roles, POS tags) is absent.
    #[error("missing input: {0}")]
    MissingInput(String),
}

pub type Result<T> = core::result::Result<T, Error>;
