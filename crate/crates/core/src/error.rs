use thiserror::Error;

use crate::lp::LpError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        found: usize,
    },

    #[error("invalid {field}: {reason}")]
    InvalidInput { field: String, reason: String },

    #[error("cone normal {index} violates the order-unit condition (normal . 1 = {value})")]
    OrderUnit { index: usize, value: f64 },

    #[error("no finite shortfall root: {0}")]
    NoFiniteRoot(String),

    #[error("market admits arbitrage")]
    Arbitrage,

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("model error: {0}")]
    Model(String),

    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Coarse classification used to pick process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Input,
    Numerical,
}

impl Error {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidInput {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn dims(what: impl Into<String>, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            what: what.into(),
            expected,
            found,
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Lp(LpError::NumericalBreakdown(_)) | Error::NoFiniteRoot(_) => {
                ErrorClass::Numerical
            }
            _ => ErrorClass::Input,
        }
    }
}
