use thiserror::Error;

/// Errors raised by the algebraic operations in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("mismatched parameters: expected rank {expected_rank} class {expected_class}, found rank {found_rank} class {found_class}")]
    Mismatch {
        expected_rank: usize,
        expected_class: usize,
        found_rank: usize,
        found_class: usize,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("not a group element: {0}")]
    NotGroupElement(String),

    #[error("not in the Lie span: {0}")]
    NotLie(String),

    #[error("not invertible: {0}")]
    NotInvertible(String),

    #[error("not in kernel of the projection: {0}")]
    NotInKernel(String),

    #[error("not central: {0}")]
    NotCentral(String),

    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn mismatch(expected: (usize, usize), found: (usize, usize)) -> Self {
        Error::Mismatch {
            expected_rank: expected.0,
            expected_class: expected.1,
            found_rank: found.0,
            found_class: found.1,
        }
    }

    pub(crate) fn parse(offset: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            message: message.into(),
        }
    }
}
