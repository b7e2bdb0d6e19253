use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("invariant violation: {key} = {value} ({reason})")]
    Invariant {
        key: String,
        value: String,
        reason: String,
    },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("zero-distance link between coincident points")]
    ZeroDistance,

    #[error("nonpositive distance {0}")]
    NonPositiveDistance(f64),

    #[error("direction cosine {0} outside [-1, 1]")]
    DirectionCosine(f64),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("noise power must be positive, got {0}")]
    NoisePower(f64),

    #[error("SINR must be nonnegative, got {0}")]
    NegativeSinr(f64),

    #[error("power budget must be positive, got {0}")]
    PowerBudget(f64),

    #[error("no rate samples accumulated")]
    EmptyAccumulation,

    #[error("degenerate zero channel for node {0}")]
    ZeroChannel(usize),

    #[error("action vector has length {got}, expected {expected}")]
    ActionLength { expected: usize, got: usize },

    #[error("non-finite action component at index {0}")]
    NonFiniteAction(usize),

    #[error("no active episode")]
    NoActiveEpisode,

    #[error("episode already finished")]
    EpisodeDone,

    #[error("policy failed at slot {slot}: {message}")]
    Policy { slot: usize, message: String },

    #[error("search space of {combinations} combinations exceeds the limit of {limit}")]
    SearchSpace { combinations: u128, limit: u128 },

    #[error("unknown sweep key {0}")]
    UnknownKey(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invariant(key: &str, value: impl std::fmt::Display, reason: &str) -> Self {
        Error::Invariant {
            key: key.to_owned(),
            value: value.to_string(),
            reason: reason.to_owned(),
        }
    }
}
