use thiserror::Error;

/// Errors raised by the library.
///
/// Two variants are special: [`Error::CertificateViolation`] and
/// [`Error::GuaranteeViolation`] mean the arithmetic layer produced a cut
/// that does not meet a bound it proved. They indicate a bug, never bad input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for {n} vertices")]
    InvalidVertex { vertex: usize, n: usize },
    #[error("invalid edge {edge:?}: {reason}")]
    InvalidEdge { edge: Vec<usize>, reason: &'static str },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid cut: {0}")]
    InvalidCut(String),
    #[error("expected a {expected}-uniform hypergraph, found an edge of size {found}")]
    InvalidArity { expected: usize, found: usize },
    #[error("combination plan violates the spread condition on {} edge(s)", offending.len())]
    PlanInvalid { offending: Vec<usize> },
    #[error("invalid exposure: {0}")]
    InvalidExposure(String),
    #[error("invalid reduction: {0}")]
    InvalidReduction(String),
    #[error("driver inapplicable: {0}")]
    DriverInapplicable(String),
    #[error("search failed: {0}")]
    SearchFailed(String),
    #[error("oracle infeasible: {0}")]
    OracleInfeasible(String),
    #[error("reduction certificate violated: {0}")]
    CertificateViolation(String),
    #[error("guarantee violated: {0}")]
    GuaranteeViolation(String),
}

impl Error {
    /// True when the error signals a broken internal guarantee rather than bad input.
    pub fn is_internal_violation(&self) -> bool {
        matches!(self, Error::CertificateViolation(_) | Error::GuaranteeViolation(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
