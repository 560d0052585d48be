use thiserror::Error;

/// Errors produced by the divergence kernel, the mixture model and the
/// experiment tooling.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("alphabet must contain at least one symbol")]
    EmptyAlphabet,

    #[error("duplicate alphabet label `{0}`")]
    DuplicateLabel(String),

    #[error("expected {expected} mass entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("mass at index {index} is {value}, must be a finite number in [0, 1]")]
    InvalidMass { index: usize, value: f64 },

    #[error("masses sum to {sum}, must be 1 within {tolerance:e}")]
    SumToOne { sum: f64, tolerance: f64 },

    #[error("cannot normalize weights with total {0}")]
    NotNormalizable(f64),

    #[error("PMFs are defined on different alphabets")]
    AlphabetMismatch,

    #[error("weight {0} outside [0, 1]")]
    WeightOutOfRange(f64),

    #[error("mixture weights sum to {0}, must be 1 within 1e-12")]
    WeightSum(f64),

    #[error("{weights} weights for {pmfs} PMFs")]
    ArityMismatch { weights: usize, pmfs: usize },

    #[error("derivative is unbounded: zero density at symbol {index} with nonzero slope")]
    UnboundedDerivative { index: usize },

    #[error("invalid ray: {0}")]
    InvalidRay(String),

    #[error("invalid delta spec: {0}")]
    InvalidDelta(String),

    #[error("supports of the distinguishing components intersect the support of q")]
    SupportsNotDisjoint,

    #[error("second-difference check needs at least 3 grid points, got {0}")]
    GridTooShort(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown sweep parameter `{0}`")]
    UnknownParameter(String),

    #[error("sweep result is empty")]
    EmptySweep,

    #[error("bound bracketing violated: lower {lower} <= exact {exact} <= upper {upper} fails")]
    Bracketing { lower: f64, exact: f64, upper: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
