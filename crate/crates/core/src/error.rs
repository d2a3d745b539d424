//! Error type shared across the library.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed JSON in {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("corpus record {index}: {reason}")]
    CorpusRecord { index: usize, reason: String },

    #[error("corpus record {index}: duplicate recipe id {id}")]
    DuplicateRecipeId { index: usize, id: i64 },

    #[error("cannot split corpus: {reason}")]
    DegenerateSplit { reason: String },

    #[error("unknown cuisine {name:?}")]
    UnknownCuisine { name: String },

    #[error("schema violation in {context}: {reason}")]
    SchemaViolation { context: String, reason: String },

    #[error("embedding missing from fixture for photo {photo_id:?}")]
    MissingEmbedding { photo_id: String },

    #[error("embedding has zero norm")]
    ZeroNormEmbedding,

    #[error("HTTP request failed ({})—{message}{}",
            .status.map_or("no response".to_string(), |s| format!("status {s}")),
            if *.retryable { " [retryable]" } else { "" })]
    Http {
        status: Option<u16>,
        retryable: bool,
        message: String,
    },

    #[error("environment variable {name} is not set")]
    MissingApiKey { name: String },

    #[error("knowledge base seed set is empty")]
    EmptySeedSet,

    #[error("k = {k} exceeds training size {n}")]
    KExceedsTrainingSize { k: usize, n: usize },

    #[error("test corpus is empty")]
    EmptyTestSet,

    #[error("radar chart needs at least one axis")]
    EmptyAxes,

    #[error("duplicate photo id {photo_id:?} across classifications")]
    DuplicatePhotoId { photo_id: String },

    #[error("unsupported profile schema version {found} (expected {expected})")]
    SchemaVersion { expected: u32, found: u32 },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn schema(context: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::SchemaViolation {
            context: context.into(),
            reason: reason.into(),
        }
    }
}
