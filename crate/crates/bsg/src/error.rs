use thiserror::Error;

/// All failure modes of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("{path}:{line}: {message}")]
    DatasetFormat {
        path: String,
        line: usize,
        message: String,
    },

    #[error("empty corpus: no tokens to build a vocabulary from")]
    EmptyVocabulary,

    #[error("word not in vocabulary: {0:?}")]
    UnknownWord(String),

    #[error("invalid hyperparameter {name}: {reason}")]
    InvalidHyperparameter { name: &'static str, reason: String },

    #[error("no effective iterations: max_iterations = {max_iterations} does not exceed warmup_iterations = {warmup_iterations}")]
    NoEffectiveIterations {
        max_iterations: usize,
        warmup_iterations: usize,
    },

    #[error("precision matrix not positive definite for {0}")]
    NotPositiveDefinite(String),

    #[error("corrupt checkpoint: {0}")]
    Checkpoint(String),

    #[error("cosine similarity undefined for a zero vector")]
    ZeroVector,

    #[error("non-positive variance entry in a Gaussian factor")]
    NonPositiveVariance,

    #[error("Spearman correlation undefined: {0}")]
    DegenerateRanks(&'static str),

    #[error("input length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("no usable data: {0}")]
    NoUsableData(String),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("thread pool: {0}")]
    ThreadPool(String),
}

pub type Result<T> = std::result::Result<T, Error>;
