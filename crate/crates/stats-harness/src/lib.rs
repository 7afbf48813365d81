//! Statistical comparators, experiment orchestration, persistence, and the
//! `edgelab` command-line surface.
//!
//! Experiments are described by a JSON [`ExperimentConfig`], run with
//! deterministic per-replicate random substreams (replicate `i` always uses
//! stream `i`, whatever the worker count), and persisted as JSON-lines
//! [`ResultRecord`]s plus a CSV summary whose rows keep the simulated
//! estimate, the quadrature reference, and the asymptotic limit side by
//! side.

mod config;
mod runner;
mod stats;

pub use config::{ExperimentConfig, ExperimentKind, HubLevelVariant, ResultRecord, SummaryRow};
pub use runner::{run_experiment, write_artifacts, RunArtifacts};
pub use stats::{
    dispersion_index, ecdf, empirical_tv_between, empirical_tv_to_poisson, ks_distance,
    ks_distance_uncensored, mean_and_se, wilson_interval, Ecdf, Observation,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("statistic requires at least one sample")]
    EmptySample,
    #[error("dispersion is undefined for a zero-mean sample")]
    ZeroMean,
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("worker pool: {0}")]
    Threads(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Engine(#[from] long_edge_engine::EngineError),
    #[error(transparent)]
    Hub(#[from] hub_conditioning::HubError),
    #[error(transparent)]
    Quadrature(#[from] quadrature::QuadratureError),
    #[error(transparent)]
    Analytics(#[from] analytics::AnalyticsError),
    #[error(transparent)]
    Model(#[from] model_core::ModelError),
}

impl HarnessError {
    /// Process exit code: 1 for configuration and I/O problems, 2 for
    /// violated invariants and numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Io(_) | HarnessError::Csv(_) => 1,
            _ => 2,
        }
    }
}
