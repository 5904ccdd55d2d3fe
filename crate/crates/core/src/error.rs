use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty batch")]
    EmptyBatch,

    #[error("non-finite weight exponent")]
    NonFiniteExponent,

    #[error("degenerate weights (underflow) at iteration k={k}")]
    DegenerateWeights { k: usize },

    #[error("non-finite objective value at iteration k={k}")]
    NonFiniteObjective { k: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("divergent integral: alpha*(beta+gamma) must be positive")]
    DivergentIntegral,

    #[error("oracle limited to desk-scale dimensions (d <= {max}), got d={got}")]
    OracleDimension { max: usize, got: usize },

    #[error("vanishing mass; raise quad resolution")]
    VanishingMass,

    #[error("objective has no known minimizer")]
    MissingMinimizer,

    #[error("population too small: NP={0}, need at least 4")]
    PopulationTooSmall(usize),

    #[error("not enough points for a rate fit: {0} (need at least 3)")]
    TooFewPoints(usize),

    #[error("mismatched objectives: {0} vs {1}")]
    MismatchedObjectives(String, String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("trace format error: {0}")]
    TraceFormat(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::TraceFormat(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
