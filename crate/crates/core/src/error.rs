use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("line {line}: {message}")]
    MalformedRow { line: u64, message: String },

    #[error("line {line}: attribution value {value} outside [-1, 1]")]
    ValueOutOfRange { line: u64, value: f64 },

    #[error("word `{0}` appears in both polarity tables")]
    DuplicateWord(String),

    #[error("LM lemma `{word}` is listed as both positive and negative")]
    DuplicateAcrossPolarity { word: String },

    #[error("lexicon is already normalized")]
    AlreadyNormalized,

    #[error("operation requires a non-normalized lexicon")]
    Normalized,

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid resource: {0}")]
    InvalidResource(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn malformed(line: u64, message: impl Into<String>) -> Self {
        Error::MalformedRow {
            line,
            message: message.into(),
        }
    }
}
