//! Configuration ingestion, subcommand orchestration and result files.

mod config;
mod output;
mod run;

pub use config::{
    canonical_toml, config_from_header, config_hash, locate_key, parse_config, BdgSection,
    BoundsSection, ControlSection, ExperimentConfig, InitialSection, MlfunSection, NoiseSection,
    PerMode, RunSection, SolveSection, ValidatedConfig,
};
pub use output::{write_atomic, Header, ResultTable, CONFIG_PREFIX};
pub use run::{exit_code, run, write_outcome, ExitStatus, Outcome, Subcommand};

/// A configuration rejected at `key`, with the 1-based line when known.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("config key `{key}`{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
pub struct ConfigError {
    pub key: String,
    pub line: Option<usize>,
    pub message: String,
}
