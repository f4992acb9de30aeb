use thiserror::Error;

/// Everything that can go wrong while loading an algebra or running one of
/// the deciders and constructions on it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("operation `{op}`: table has {found} entries, expected {expected} (k^arity)")]
    Dimension {
        op: String,
        expected: usize,
        found: usize,
    },

    #[error("operation `{op}`: entry {position} has value {value}, outside universe of size {k}")]
    Range {
        op: String,
        position: usize,
        value: i64,
        k: usize,
    },

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("arity mismatch: expected {expected} arguments, got {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("element {value} out of range for universe of size {k}")]
    ElementOutOfRange { value: usize, k: usize },

    #[error("universe mismatch: algebra has size {expected}, tuple set has size {found}")]
    UniverseMismatch { expected: usize, found: usize },

    #[error("operation `{op}` is not idempotent: {op}({element},...,{element}) = {value}")]
    NotIdempotent {
        op: String,
        element: u8,
        value: u8,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("budget exceeded: {what} (limit {limit})")]
    BudgetExceeded { what: String, limit: u64 },
}

impl Error {
    pub(crate) fn budget(what: impl Into<String>, limit: u64) -> Self {
        Error::BudgetExceeded {
            what: what.into(),
            limit,
        }
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// Whether the error describes a malformed algebra document.
    pub fn is_invalid_algebra(&self) -> bool {
        matches!(
            self,
            Error::Syntax { .. }
                | Error::Dimension { .. }
                | Error::Range { .. }
                | Error::InvalidAlgebra(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
