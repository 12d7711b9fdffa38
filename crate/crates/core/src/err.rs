//! Error taxonomy shared by every module.
//!
//! The split matters for callers: `Input` is the user's fault, `PrecisionExhausted`
//! means "give me more series terms / more bits and try again", `BudgetExhausted`
//! means an iteration cap was hit honestly, and `Internal` is a bug — an invariant
//! that is supposed to be unconditionally true failed, so the result must not be
//! trusted.  The CLI maps these onto distinct exit codes.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or unsupported input (bad JSON, mixed backends, type III/IV point, ...).
    #[error("input error: {0}")]
    Input(String),

    /// A computation ran out of known series terms or float bits; retry with more.
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    /// An iteration/state budget was exhausted before a certificate was found.
    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),

    /// A disk-membership count depends on a boundary case the current truncation
    /// cannot decide (a polygon slope equals the radius exactly and an uncertain
    /// coefficient sits on that edge).
    #[error("boundary ambiguous: {0}")]
    BoundaryAmbiguous(String),

    /// The exact backend cannot represent a required algebraic number
    /// (e.g. an irrational residue root).  The float backend may succeed.
    #[error("unrepresentable over the exact coefficient field: {0}")]
    Unrepresentable(String),

    /// The truncated transition system has more than one stationary distribution,
    /// so the computed measure would be meaningless.
    #[error("stationary distribution is not unique: {0}")]
    NonUniqueStationary(String),

    /// An internal invariant failed.  Always a bug, never a data problem.
    #[error("internal invariant violation: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI (0 is success and never produced here).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) => 2,
            Error::PrecisionExhausted(_)
            | Error::BoundaryAmbiguous(_)
            | Error::Unrepresentable(_) => 3,
            Error::BudgetExhausted(_) => 4,
            Error::NonUniqueStationary(_) | Error::Internal(_) => 5,
        }
    }

    pub fn is_precision(&self) -> bool {
        matches!(
            self,
            Error::PrecisionExhausted(_) | Error::BoundaryAmbiguous(_) | Error::Unrepresentable(_)
        )
    }
}

/// Shorthand constructors; `err::input("...")` reads better than the enum path.
pub fn input<S: Into<String>>(s: S) -> Error {
    Error::Input(s.into())
}
pub fn precision<S: Into<String>>(s: S) -> Error {
    Error::PrecisionExhausted(s.into())
}
pub fn budget<S: Into<String>>(s: S) -> Error {
    Error::BudgetExhausted(s.into())
}
pub fn boundary<S: Into<String>>(s: S) -> Error {
    Error::BoundaryAmbiguous(s.into())
}
pub fn unrepresentable<S: Into<String>>(s: S) -> Error {
    Error::Unrepresentable(s.into())
}
pub fn internal<S: Into<String>>(s: S) -> Error {
    Error::Internal(s.into())
}
