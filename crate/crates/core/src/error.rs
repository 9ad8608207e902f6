use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = AmenError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum AmenError {
    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("node index {0} out of range")]
    NodeOutOfRange(usize),

    #[error("degenerate neighborhood: {0}")]
    DegenerateNeighborhood(String),

    #[error("null model undefined: graph has no edges")]
    UndefinedNullModel,

    #[error("binary-mixed similarity requires 0/1 attributes; node {node} attribute {attr} has value {value}")]
    NonBinaryAttribute { node: usize, attr: usize, value: f64 },

    #[error("invalid weight vector: {0}")]
    InvalidWeights(String),

    #[error("empty relevance vector")]
    EmptyRelevance,

    #[error("invalid top-k parameter k={k} (attribute count {d})")]
    InvalidTopK { k: usize, d: usize },

    #[error("{measure} undefined: {reason}")]
    UndefinedMeasure {
        measure: &'static str,
        reason: &'static str,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no eligible neighborhoods with size in [{min}, {max}]")]
    NoEligibleNeighborhoods { min: usize, max: usize },

    #[error("no nodes outside the neighborhood")]
    NoOutsideNodes,

    #[error("average precision undefined: no positive labels")]
    NoPositives,

    #[error("length mismatch: {0} scores vs {1} labels")]
    LengthMismatch(usize, usize),

    #[error("serialization failed: {0}")]
    Serialize(String),
}

impl AmenError {
    pub(crate) fn parse(source_name: &str, line: usize, message: impl Into<String>) -> Self {
        AmenError::Parse {
            source_name: source_name.to_string(),
            line,
            message: message.into(),
        }
    }

    /// Whether the error was caused by user-supplied input rather than an internal fault.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, AmenError::Serialize(_))
    }
}
