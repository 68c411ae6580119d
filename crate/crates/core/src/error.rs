use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("table dimensions must be positive (got {states} states x {actions} actions)")]
    ZeroDimension { states: usize, actions: usize },

    #[error("state {state} out of range (table has {num_states} states)")]
    StateOutOfRange { state: usize, num_states: usize },

    #[error("action {action} out of range (table has {num_actions} actions)")]
    ActionOutOfRange { action: usize, num_actions: usize },

    #[error("reward must be finite, got {0}")]
    NonFiniteReward(f64),

    #[error("swarm must contain at least one particle")]
    EmptySwarm,

    #[error("particle {0} does not appear in the trace")]
    UnknownParticle(usize),

    #[error("invalid value for `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("unknown preset `{name}` (valid presets: {valid})")]
    UnknownPreset { name: String, valid: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: malformed trace row: {reason}")]
    TraceFormat { path: PathBuf, reason: String },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{path}: {message}")]
    ConfigParse { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }
}
