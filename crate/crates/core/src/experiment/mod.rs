//! Batch experiments: a TOML-described grid of schemes over many neuron
//! mappings, all driven by one spike trace.

mod config;
mod run;

use thiserror::Error;

use crate::addressing::AddressError;
use crate::noc::SimError;
use crate::traffic::TrafficError;

pub use config::{
    ConfigIssue, EnergySection, ExperimentConfig, MappingSection, OutputSection, StrategyKind,
    TraceSection, TreeSection,
};
pub use run::{
    load_mappings, load_trace, run_experiment, ExperimentResult, RunRow, SchemeSummary, Stat, Summary,
};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid config:\n{}", .0.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<ConfigIssue>),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Traffic(#[from] TrafficError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Address(#[from] AddressError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl ExperimentError {
    /// Problems with the config itself, as opposed to failures while running it.
    pub fn is_validation(&self) -> bool {
        matches!(self, Self::Parse(_) | Self::Invalid(_))
    }
}
