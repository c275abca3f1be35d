use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate lattice: generators are linearly dependent over the reals")]
    DegenerateLattice,
    #[error("structured set lines coincide: anchors differ only along the line direction")]
    CoincidentLines,
    #[error("point set is not uniformly discrete: {0}")]
    NotDiscrete(String),
    #[error("insufficient coverage: {0}")]
    InsufficientCoverage(String),
    #[error("at least {needed} points are required, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("|z| = {modulus} exceeds the quadrature window {limit}")]
    OutsideQuadratureWindow { modulus: f64, limit: f64 },
    #[error("tail estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    TruncationTooShort { estimate: f64, tolerance: f64 },
    #[error("root iteration did not converge after {sweeps} sweeps")]
    NonConvergence { sweeps: usize },
    #[error("held-out residual {residual:e} exceeds {tolerance:e} for degree {degree}")]
    DegreeMismatch { degree: usize, residual: f64, tolerance: f64 },
    #[error("degree {degree} exceeds the conditioning limit {limit}")]
    Conditioning { degree: usize, limit: usize },
    #[error("roots are not closed under reflection across the sampling line")]
    ConjugateClosure,
    #[error("no zero assignment reproduces the samples (best residual {best_residual:e})")]
    NoConsistentAssignment { best_residual: f64 },
    #[error("{count} ambiguous zero pairs exceed the enumeration cap {cap}")]
    TooManyAmbiguousPairs { count: usize, cap: usize },
    #[error("no degree up to {q_max} fits the samples")]
    DegreeOverflow { q_max: usize },
    #[error("density {density} does not exceed the required {required}")]
    DensityHypothesis { density: f64, required: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable identifier, used by the command line front end.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DegenerateLattice => "degenerate-lattice",
            Error::CoincidentLines => "coincident-lines",
            Error::NotDiscrete(_) => "not-discrete",
            Error::InsufficientCoverage(_) => "insufficient-coverage",
            Error::TooFewPoints { .. } => "too-few-points",
            Error::OutsideQuadratureWindow { .. } => "domain",
            Error::TruncationTooShort { .. } => "truncation-too-short",
            Error::NonConvergence { .. } => "nonconvergence",
            Error::DegreeMismatch { .. } => "degree-mismatch",
            Error::Conditioning { .. } => "conditioning",
            Error::ConjugateClosure => "conjugate-closure",
            Error::NoConsistentAssignment { .. } => "no-consistent-assignment",
            Error::TooManyAmbiguousPairs { .. } => "too-many-ambiguous-pairs",
            Error::DegreeOverflow { .. } => "degree-overflow",
            Error::DensityHypothesis { .. } => "density-hypothesis",
            Error::InvalidInput(_) => "invalid-input",
            Error::Parse(_) => "parse",
        }
    }
}
