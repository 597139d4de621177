//! Command-line front end: configuration loading and experiment output.

mod config;
mod run;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{
    km_to_m, load_config, m_to_km, parse_config, RunConfig, FREQUENCY_BANDS_GHZ,
    POWER_BUDGET_RANGE_WH,
};
pub use run::{format_sci, run, write_sweep_csv, RunArtifacts, CSV_HEADER, TOOL_NAME, TOOL_VERSION};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid config: {0}")]
    Invalid(String),

    #[error(transparent)]
    Model(#[from] crate::Error),
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{scenario}: {source}")]
    Scenario {
        scenario: crate::scenarios::Scenario,
        source: crate::Error,
    },

    #[error(transparent)]
    Model(#[from] crate::Error),
}
