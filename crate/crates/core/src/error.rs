use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("config parse error: {0}")]
    Parse(#[source] serde_json::Error),

    #[error("invalid config field `{field}`: {reason}")]
    Invalid { field: String, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("terminal placement failed: placed {placed} of {requested} terminals after {attempts} attempts")]
    Placement {
        placed: usize,
        requested: usize,
        attempts: usize,
    },

    #[error("degenerate link geometry: {0}")]
    Geometry(String),

    #[error("jain index of an empty battery vector")]
    EmptyBatteries,

    #[error("episode finished")]
    EpisodeFinished,

    #[error("environment not reset")]
    NotReset,

    #[error("invalid action: {0}")]
    InvalidAction(String),

    #[error("unknown policy `{0}`")]
    UnknownPolicy(String),

    #[error("invalid run spec: {0}")]
    RunSpec(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(field: &str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.to_string(),
            reason: reason.into(),
        }
    }
}
