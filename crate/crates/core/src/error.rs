use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NluError {
    #[error("intent name must not be empty")]
    EmptyName,
    #[error("intent `{0}` is already registered")]
    DuplicateIntent(String),
    #[error("intent `{intent}` has a phrase with no tokens: {phrase:?}")]
    EmptyPhrase { intent: String, phrase: String },
}

#[derive(Debug, Error)]
pub enum KnowledgeError {
    #[error("knowledge key must not be empty")]
    EmptyKey,
    #[error("knowledge entry `{0}` already exists (pass overwrite to replace it)")]
    DuplicateKey(String),
    #[error("document for `{0}` is empty")]
    EmptyDocument(String),
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid manifest {path}: {source}")]
    Manifest {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: Box<KnowledgeError>,
    },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PromptError {
    #[error("history turn {index} has empty text")]
    InvalidTurn { index: usize },
    #[error("history window must be at least 2 turns, got {0}")]
    WindowTooSmall(usize),
    #[error("emoticon vocabulary must not be empty")]
    EmptyVocabulary,
    #[error("emoticon `{0}` appears more than once in the vocabulary")]
    DuplicateEmoticon(String),
    #[error("emoticon `{0}` is not in the gesture map")]
    UnmappedEmoticon(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GestureError {
    #[error("emoticon token must not be empty")]
    EmptyToken,
    #[error("emoticon token {0:?} contains whitespace")]
    WhitespaceInToken(String),
    #[error("emoticon token {0:?} is mapped more than once")]
    DuplicateToken(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LlmError {
    #[error("prompt is empty")]
    EmptyPrompt,
    #[error("endpoint rejected credentials (status {0})")]
    AuthFailure(u16),
    #[error("endpoint rate limited the request after {attempts} attempts")]
    RateLimited { attempts: u32 },
    #[error("request timed out after {attempts} attempts")]
    Timeout { attempts: u32 },
    #[error("endpoint returned status {status} after {attempts} attempts")]
    ServerError { status: u16, attempts: u32 },
    #[error("malformed completion response: {0}")]
    MalformedResponse(String),
    #[error("endpoint unreachable: {0}")]
    EndpointUnreachable(String),
    #[error("invalid llm configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid JSON in {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("invalid TOML in {path}: {source}")]
    Toml {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },
    #[error("invalid intent registry {path}: {source}")]
    Intents {
        path: PathBuf,
        #[source]
        source: NluError,
    },
    #[error(transparent)]
    Knowledge(#[from] KnowledgeError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Gesture(#[from] GestureError),
    #[error(transparent)]
    Llm(#[from] LlmError),
    #[error("invalid value for {key}: {value:?}")]
    InvalidValue { key: String, value: String },
}

#[derive(Debug, Error)]
pub enum TranscriptError {
    #[error("transcript io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("bad transcript record at {path}:{line}: {source}")]
    Parse {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("transcript writer has shut down")]
    WriterClosed,
}
