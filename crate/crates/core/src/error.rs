use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("coin dimension must be a positive even integer, got {0}")]
    OddCoinDimension(usize),

    #[error("kick period tau must be positive and finite, got {0}")]
    InvalidTau(f64),

    #[error("chaos parameter g must be finite and non-negative, got {0}")]
    InvalidChaosParameter(f64),

    #[error("boundary phase phi must lie in [0, 1), got {0}")]
    InvalidPhase(f64),

    #[error("lattice needs at least 2 sites, got {0}")]
    TooFewSites(usize),

    #[error("coin matrix is {found}x{found} but the walk expects dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix deviates from unitarity by {0:e}")]
    NotUnitary(f64),

    #[error("state representation does not match the operator ({0})")]
    RepresentationMismatch(&'static str),

    #[error("index out of range: {what} = {index}, limit {limit}")]
    IndexOutOfRange { what: &'static str, index: usize, limit: usize },

    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(f64),

    #[error("empty ensemble")]
    EmptyEnsemble,

    #[error("partition threshold must lie in (0, 1), got {0}")]
    InvalidThreshold(f64),

    #[error("{0}")]
    InvalidArgument(String),
}
