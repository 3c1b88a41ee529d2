use thiserror::Error;

use crate::amr::{GraphError, PenmanError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("PENMAN: {0}")]
    Penman(#[from] PenmanError),

    #[error("invalid graph: {0}")]
    Graph(#[from] GraphError),

    #[error("CoNLL-U line {line}: {message}")]
    Conllu { line: usize, message: String },

    #[error("AMR corpus entry {entry}: {message}")]
    AmrCorpus { entry: usize, message: String },

    #[error("embeddings line {line}: {message}")]
    Embedding { line: usize, message: String },

    #[error("sentence {sentence_id}: {message}")]
    Alignment { sentence_id: String, message: String },

    #[error("invalid data: {0}")]
    Data(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error("model file: {0}")]
    Model(String),

    #[error("model file version {found} is not supported (expected {expected})")]
    ModelVersion { found: u32, expected: u32 },

    #[error("exact SMATCH search refused: {0}")]
    SizeGuard(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by how the tool was configured rather than by
    /// the content of an input file.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_))
    }
}
