use thiserror::Error;

/// Errors produced by the estimators, samplers and persistence layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dataset is empty")]
    EmptyDataset,

    #[error("dataset needs at least 2 points, got {0}")]
    TooFewPoints(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite coordinate at point {point}, column {column}")]
    NonFiniteCoordinate { point: usize, column: usize },

    #[error("points {0} and {1} coincide; deduplicate the data or add a small jitter")]
    DuplicatePoints(usize, usize),

    #[error("sample index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("requested {m} neighbors but only {available} are available")]
    MTooLarge { m: usize, available: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("{regularized} of {trials} trials needed covariance regularization (limit 1%)")]
    SingularExcess { regularized: usize, trials: usize },

    #[error("local covariance at point {0} is singular")]
    SingularSigma(usize),

    #[error("bias entry {entry} does not match estimator configuration {config}")]
    BiasMismatch { entry: String, config: String },

    #[error("missing bias entry for {0}")]
    MissingBiasEntry(String),

    #[error("alpha = 1 has no Renyi entropy estimate (the functional is identically 1)")]
    AlphaOne,

    #[error("estimate of J is not positive ({0}); log is undefined")]
    NonPositiveJ(f64),

    #[error("k = {k} must exceed alpha - 1 = {alpha_minus_one}")]
    InvalidK { k: usize, alpha_minus_one: f64 },

    #[error("bandwidth is zero (all marginal variances vanish)")]
    ZeroBandwidth,

    #[error("correlation must satisfy |r| < 1, got {0}")]
    BadCorrelation(f64),

    #[error("no closed-form ground truth for {0}")]
    Unsupported(String),

    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),

    #[error("bias table format version {found} is not supported (expected {expected})")]
    FormatVersionMismatch { found: String, expected: u32 },

    #[error("corrupt entry at line {line}: {reason}")]
    CorruptEntry { line: usize, reason: String },

    #[error("{method} failed at {point} trial {trial}: {source}")]
    Trial {
        method: String,
        point: String,
        trial: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
