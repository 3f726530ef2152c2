use thiserror::Error;

/// Errors produced by the calculus and integration routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not positive definite (leading minor {minor} is {value})")]
    NotPositiveDefinite { minor: usize, value: String },
    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("index {index} out of range 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("size guard exceeded: {0}")]
    SizeGuard(String),
    #[error("no vertex tensor for valence {0}")]
    MissingVertexTensor(usize),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("generator mismatch: {0} vs {1}")]
    GeneratorMismatch(usize, usize),
    #[error("exponential needs an even nilpotent argument: {0}")]
    NotEvenNilpotent(String),
    #[error("degenerate gauge orbit at the origin")]
    DegenerateOrbit,
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("divergent integrand: {0}")]
    Divergent(String),
    #[error("no generic projection found after {0} attempts")]
    NonGenericProjection(usize),
    #[error("link is not embedded: {0}")]
    NotEmbedded(String),
    #[error("component {0} has no framing")]
    MissingFraming(usize),
    #[error("invalid link: {0}")]
    InvalidLink(String),
    #[error("sample budget must be positive")]
    ZeroSamples,
    #[error("degree {0} exceeds the supported maximum of 2")]
    DegreeTooHigh(usize),
    #[error("invalid move: {0}")]
    InvalidMove(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of a numerical guard rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SizeGuard(_)
                | Error::Quadrature(_)
                | Error::Divergent(_)
                | Error::NonGenericProjection(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
