use thiserror::Error;

/// Failure modes shared by every module of the crate.
///
/// Verdicts such as "this matrix is not PT-symmetric" are never errors; they
/// are reported in the corresponding report types. Errors are reserved for
/// inputs that violate an operation's preconditions or for numerical
/// breakdown.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PtError {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    /// An operator or matrix handed to an operation does not satisfy the
    /// identities the operation requires of it.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A parameter record violates a documented constraint.
    #[error("constraint violated: {0}")]
    Constraint(String),

    /// A closed-form normalizer vanishes at the requested parameters.
    #[error("singular case: normalizer {0} vanishes")]
    Singular(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, PtError>;
