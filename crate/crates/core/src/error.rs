use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("determinant is not a unit of S[1/Q]: {0}")]
    NotAUnit(String),
    #[error("unknown Coxeter type `{0}` (built-ins: A2, B2, G2, A3, B3, B4, D4)")]
    UnknownType(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid datum: {0}")]
    Validation(String),
    #[error("group has more than {0} elements")]
    GroupTooLarge(usize),
    #[error("structure violation: {0}")]
    StructureViolation(String),
    #[error("cross-check failure: {0}")]
    CrossCheckFailure(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("form is not W-invariant: {0}")]
    NotInvariant(String),
    #[error("form is not logarithmic: {0}")]
    NotLogarithmic(String),
    #[error("no decomposition exists: {0}")]
    Inconsistent(String),
    #[error("identity violated: {0}")]
    IdentityViolation(String),
    #[error("normalization mismatch: {0}")]
    NormalizationMismatch(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("counterexample found: {0}")]
    CounterexampleFound(String),
}

impl Error {
    pub fn parse(line: usize, column: usize, message: impl Into<String>) -> Error {
        Error::Parse { line, column, message: message.into() }
    }

    /// Stable name of the variant, used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotAUnit(_) => "NotAUnit",
            Error::UnknownType(_) => "UnknownType",
            Error::Parse { .. } => "ParseError",
            Error::Validation(_) => "ValidationError",
            Error::GroupTooLarge(_) => "GroupTooLarge",
            Error::StructureViolation(_) => "StructureViolation",
            Error::CrossCheckFailure(_) => "CrossCheckFailure",
            Error::PreconditionViolated(_) => "PreconditionViolated",
            Error::NotInvariant(_) => "NotInvariant",
            Error::NotLogarithmic(_) => "NotLogarithmic",
            Error::Inconsistent(_) => "Inconsistent",
            Error::IdentityViolation(_) => "IdentityViolation",
            Error::NormalizationMismatch(_) => "NormalizationMismatch",
            Error::Domain(_) => "DomainError",
            Error::CounterexampleFound(_) => "CounterexampleFound",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
