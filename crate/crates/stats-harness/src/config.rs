//! Experiment configuration and the per-replicate result record.

use crate::HarnessError;
use model_core::ModelParams;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Which experiment the harness runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Emit the closed-form constants of the parameter set.
    Constants,
    /// Simulate the exceedance count and maximum over an n-grid.
    SimulateMax,
    /// Conditional peaks-over-threshold experiment.
    SimulatePot,
    /// Quadrature-only diagnostics (no random numbers).
    VerifyIntegrals,
    /// Engine versus brute-force distributional comparison.
    OracleCompare,
}

/// Which hub-level convention pairs with the threshold scale `c_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HubLevelVariant {
    /// The peaks-over-threshold form (with the `beta^{1/beta}` factor).
    #[default]
    Pot,
    /// The plain `kappa`-based form.
    Plain,
}

fn default_replicates() -> u32 {
    1
}

fn default_r_grid() -> Vec<f64> {
    vec![1.0]
}

/// Full description of one harness run; JSON on disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub params: ModelParams,
    #[serde(default)]
    pub experiment_id: Option<String>,
    /// Window half-widths, increasing.
    #[serde(default)]
    pub n_grid: Vec<f64>,
    #[serde(default = "default_replicates")]
    pub replicates: u32,
    /// Threshold multipliers of `c_n` for the max experiment.
    #[serde(default = "default_r_grid")]
    pub r_grid: Vec<f64>,
    /// Excess grid for the peaks-over-threshold experiment.
    #[serde(default)]
    pub t_grid: Vec<f64>,
    /// Exponent `e` in the free threshold scale `c_n = n^e` of the
    /// peaks-over-threshold experiment; `3 d / 2` when absent.
    #[serde(default)]
    pub cn_exponent: Option<f64>,
    #[serde(default)]
    pub hub_level_variant: HubLevelVariant,
    pub master_seed: u64,
    #[serde(default)]
    pub workers: Option<usize>,
    /// Exceedance threshold for the oracle comparison.
    #[serde(default)]
    pub threshold: Option<f64>,
    /// Truncation box half-width for the oracle comparison.
    #[serde(default)]
    pub cutoff: Option<f64>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)?;
        let config: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|source| HarnessError::Config(source.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.replicates < 1 {
            return Err(HarnessError::Config("replicates must be >= 1".into()));
        }
        if !self.n_grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(HarnessError::Config("n_grid must be increasing".into()));
        }
        let needs_grid = matches!(
            self.experiment,
            ExperimentKind::SimulateMax | ExperimentKind::SimulatePot | ExperimentKind::VerifyIntegrals
        );
        if needs_grid && self.n_grid.is_empty() {
            return Err(HarnessError::Config("n_grid must be non-empty".into()));
        }
        if self.experiment == ExperimentKind::SimulatePot && self.t_grid.is_empty() {
            return Err(HarnessError::Config(
                "t_grid must be non-empty for the peaks-over-threshold experiment".into(),
            ));
        }
        if self.experiment == ExperimentKind::OracleCompare
            && (self.threshold.is_none() || self.cutoff.is_none())
        {
            return Err(HarnessError::Config(
                "oracle comparison needs threshold and cutoff".into(),
            ));
        }
        Ok(())
    }

    pub fn id(&self) -> String {
        self.experiment_id.clone().unwrap_or_else(|| {
            match self.experiment {
                ExperimentKind::Constants => "constants",
                ExperimentKind::SimulateMax => "simulate-max",
                ExperimentKind::SimulatePot => "simulate-pot",
                ExperimentKind::VerifyIntegrals => "verify-integrals",
                ExperimentKind::OracleCompare => "oracle-compare",
            }
            .to_string()
        })
    }
}

/// One replicate's observables; JSON-lines on disk. Identical config and
/// master seed produce byte-identical records regardless of worker count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub experiment_id: String,
    pub params: ModelParams,
    pub n: f64,
    pub replicate: u32,
    pub stream_id: u64,
    /// Sampling arm, for experiments with more than one ("engine"/"brute").
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arm: Option<String>,
    /// Exceedance count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<u64>,
    /// Maximal exceedance length when one was observed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_star: Option<f64>,
    /// Censoring level when no exceedance was observed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub censored_at: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hub_count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hub_weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_n: Option<u64>,
    /// Per-grid-point exceedance indicators of the POT experiment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indicators: Option<Vec<bool>>,
}

impl ResultRecord {
    pub fn new(experiment_id: &str, params: &ModelParams, n: f64, replicate: u32, stream_id: u64) -> Self {
        ResultRecord {
            experiment_id: experiment_id.to_string(),
            params: *params,
            n,
            replicate,
            stream_id,
            arm: None,
            f: None,
            e_star: None,
            censored_at: None,
            hub_count: None,
            hub_weights: None,
            x_n: None,
            indicators: None,
        }
    }
}

/// One summary row; CSV on disk. Each metric carries the simulated value
/// (with spread where defined), its quadrature reference, and the
/// asymptotic limit, so simulation error and asymptotic error stay
/// separable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SummaryRow {
    pub experiment_id: String,
    pub n: f64,
    pub metric: String,
    pub value: f64,
    pub spread_lo: Option<f64>,
    pub spread_hi: Option<f64>,
    pub quadrature_ref: Option<f64>,
    pub limit: Option<f64>,
}

impl SummaryRow {
    pub fn bare(experiment_id: &str, n: f64, metric: &str, value: f64) -> Self {
        SummaryRow {
            experiment_id: experiment_id.to_string(),
            n,
            metric: metric.to_string(),
            value,
            spread_lo: None,
            spread_hi: None,
            quadrature_ref: None,
            limit: None,
        }
    }
}
