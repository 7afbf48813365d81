//! `edgelab` — run simulation and verification experiments from the
//! command line.
//!
//! Each subcommand selects an experiment kind; `--config` points at a JSON
//! experiment description (the subcommand overrides its `experiment`
//! field), and without a config a small demonstration setup is used.
//! Exit codes: 0 success, 1 configuration or I/O error, 2 invariant or
//! numerical failure.

use clap::{Parser, Subcommand};
use model_core::ModelParams;
use stats_harness::{
    run_experiment, write_artifacts, ExperimentConfig, ExperimentKind, HarnessError,
    HubLevelVariant,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "edgelab", about = "Extreme edge-length experiments on scale-free spatial graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker count override (also: EDGELAB_WORKERS).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory for records and summaries.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Print and persist the closed-form constants of the parameter set.
    Constants,
    /// Simulate exceedance counts and the scaled maximum over an n-grid.
    SimulateMax,
    /// Conditional peaks-over-threshold experiment.
    SimulatePot,
    /// Quadrature-only integral diagnostics.
    VerifyIntegrals,
    /// Engine versus brute-force comparison.
    OracleCompare,
}

impl Command {
    fn kind(&self) -> ExperimentKind {
        match self {
            Command::Constants => ExperimentKind::Constants,
            Command::SimulateMax => ExperimentKind::SimulateMax,
            Command::SimulatePot => ExperimentKind::SimulatePot,
            Command::VerifyIntegrals => ExperimentKind::VerifyIntegrals,
            Command::OracleCompare => ExperimentKind::OracleCompare,
        }
    }
}

fn demo_config(kind: ExperimentKind) -> ExperimentConfig {
    let mut config = ExperimentConfig {
        experiment: kind,
        params: ModelParams::new(1, 1.5, 2.0, 1.0),
        experiment_id: None,
        n_grid: vec![5.0, 10.0, 20.0],
        replicates: 500,
        r_grid: vec![1.0],
        t_grid: vec![],
        cn_exponent: None,
        hub_level_variant: HubLevelVariant::default(),
        master_seed: 2026,
        workers: None,
        threshold: None,
        cutoff: None,
    };
    match kind {
        ExperimentKind::SimulatePot => {
            config.n_grid = vec![50.0];
            config.t_grid = vec![0.0, 0.5, 1.0, 2.0, 4.0];
            config.replicates = 500;
        }
        ExperimentKind::VerifyIntegrals => {
            config.n_grid = vec![1e3, 1e4, 1e5, 1e6];
        }
        ExperimentKind::OracleCompare => {
            config.n_grid = vec![5.0];
            config.threshold = Some(15.0);
            config.cutoff = Some(200.0);
        }
        _ => {}
    }
    config
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => demo_config(cli.command.kind()),
    };
    config.experiment = cli.command.kind();
    if let Some(seed) = cli.seed {
        config.master_seed = seed;
    }
    if let Some(workers) = cli.workers {
        config.workers = Some(workers);
    }
    config.validate()?;

    let artifacts = run_experiment(&config)?;
    for warning in &artifacts.warnings {
        eprintln!("warning: {warning}");
    }
    let (records_path, summary_path) = write_artifacts(&artifacts, &cli.out, &config.id())?;
    for row in &artifacts.summary {
        let reference = row
            .quadrature_ref
            .map_or(String::new(), |v| format!("  reference {v:.6}"));
        let limit = row.limit.map_or(String::new(), |v| format!("  limit {v:.6}"));
        println!("n={:<10} {:<24} {:.6}{reference}{limit}", row.n, row.metric, row.value);
    }
    println!("records: {}", records_path.display());
    println!("summary: {}", summary_path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
