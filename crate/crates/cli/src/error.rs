use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("duplicate key '{key}' on line {line} (first set on line {first})")]
    DuplicateKey { key: String, first: usize, line: usize },

    #[error("unknown key '{key}' for scenario {scenario}")]
    UnknownKey { key: String, scenario: &'static str },

    #[error("missing required key '{0}'")]
    MissingKey(String),

    #[error("unknown scenario '{0}' (expected one of: spectrum, saturation, g2, bunching-map, pump-probe, beat, eit, chain, modes, ensemble)")]
    UnknownScenario(String),

    #[error("{key} {constraint} (got {value})")]
    Constraint {
        key: String,
        constraint: String,
        value: String,
    },

    #[error("{scenario} scenario: {source}")]
    Physics {
        scenario: &'static str,
        #[source]
        source: wgqed_core::Error,
    },

    #[error("non-finite value in column '{column}' at row {row}")]
    NonFinite { column: String, row: usize },

    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed result document: {0}")]
    Format(String),

    #[error("{0}")]
    Usage(String),
}
