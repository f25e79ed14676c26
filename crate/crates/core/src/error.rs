use thiserror::Error;

/// Failure modes shared by every module of the crate.
///
/// The variants line up with the process exit codes used by the command-line
/// front end, so keep them coarse.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A mathematical precondition failed (division by zero, zero to a negative power, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// Operands from incompatible contexts were mixed (e.g. two different primes).
    #[error("usage error: {0}")]
    Usage(String),
    /// A configured resource cap (degree, term count, carry bound) was hit.
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    /// The input lies outside what the structural algorithms handle.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// A construction failed its own self-check.
    #[error("construction failed: {0}")]
    Construction(String),
    /// Text input could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
    /// Parsed input is semantically invalid.
    #[error("validation error: {0}")]
    Validation(String),
    /// A bounded nested search ran out of room before it could decide.
    #[error("search cap exhausted: {0}")]
    CapExhausted(String),
    /// An internal cross-check disagreed with itself.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
