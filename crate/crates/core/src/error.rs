use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid point system: {0}")]
    InvalidPointSystem(String),

    #[error("spin is not unit: ||alpha|^2 + |beta|^2 - 1| = {0:e}")]
    NonUnitSpin(f64),

    #[error("floating-point overflow evaluating term {index}")]
    Overflow { index: usize },

    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("no built-in fixing system for n = {n} ({group})")]
    UnsupportedCount { n: usize, group: String },

    #[error("catalog entry `{id}` requires user-supplied coefficients: {missing}")]
    StubRequiresCoefficients { id: String, missing: String },

    #[error("degenerate orbit: every point sits at the origin")]
    DegenerateOrbit,

    #[error("constant polynomial has no circle zeros to report")]
    ConstantPolynomial,

    #[error("polynomial must vanish at zero (constant term {0:e})")]
    NonzeroConstantTerm(f64),

    #[error("zero polynomial")]
    ZeroPolynomial,

    #[error("certification failed: {0}")]
    CertificationFailed(String),

    #[error("solver failure: {0}")]
    SolverFailure(String),

    #[error("point is not on the fixing variety (residual {0:e})")]
    NotOnVariety(f64),

    #[error("base configuration not reduced: {equation} has residual {residual:e}")]
    BaseNotReduced { equation: String, residual: f64 },

    #[error("invalid polyhedron: {0}")]
    InvalidPolyhedron(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
