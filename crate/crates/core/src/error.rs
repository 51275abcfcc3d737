use thiserror::Error;

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Input violates a physical or structural invariant.
    Validation,
    /// A numerical operation broke down (singular, ill-conditioned, divergent).
    Numerical,
    /// Arguments outside the domain of an operation, or unsupported requests.
    Domain,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("singular state: A' - C' has non-positive eigenvalue {eigenvalue:e}")]
    SingularState { eigenvalue: f64 },

    #[error("{what} is ill-conditioned (condition number {condition:e} exceeds {bound:e})")]
    IllConditioned {
        what: &'static str,
        condition: f64,
        bound: f64,
    },

    #[error("{what} is not positive definite (smallest eigenvalue {eigenvalue:e})")]
    NotPositiveDefinite { what: &'static str, eigenvalue: f64 },

    #[error("non-normalizable state: mode parameter eta = {eta} is not below 1")]
    NonNormalizable { eta: f64 },

    #[error("invalid state: mode parameter eta = {eta:e} is negative")]
    NegativeEta { eta: f64 },

    #[error("unphysical state: symplectic value {mu} is below 1")]
    Unphysical { mu: f64 },

    #[error("zero-mode divergence: periodic chain (alpha = 0) requires mass > 0")]
    ZeroModeDivergence,

    #[error("evolution diverged at t = {time}")]
    Divergence { time: f64 },

    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::NotPositiveDefinite { .. }
            | Error::NegativeEta { .. }
            | Error::Unphysical { .. }
            | Error::ZeroModeDivergence
            | Error::Invalid(_) => ErrorClass::Validation,
            Error::SingularState { .. }
            | Error::IllConditioned { .. }
            | Error::NonNormalizable { .. }
            | Error::Divergence { .. }
            | Error::DegenerateFit(_) => ErrorClass::Numerical,
            Error::DimensionMismatch { .. } | Error::Domain(_) | Error::Unsupported(_) => ErrorClass::Domain,
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
