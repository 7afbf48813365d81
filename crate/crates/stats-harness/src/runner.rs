//! Experiment orchestration: deterministic replicate dispatch, aggregation,
//! and persistence.

use crate::config::{ExperimentConfig, ExperimentKind, HubLevelVariant, ResultRecord, SummaryRow};
use crate::stats::{
    dispersion_index, empirical_tv_between, empirical_tv_to_poisson, ks_distance, mean_and_se,
    wilson_interval, Observation,
};
use crate::HarnessError;
use analytics::{
    cn_constant, frechet_cdf, gpd_tail, hub_level_dn, k_constant, kappa_beta,
    kappa_hub_level_dn, omega_d, pot_threshold_tn, scaling_cn,
};
use hub_conditioning::{simulate_pot_conditional_at_level, PotReplicate};
use long_edge_engine::{brute_force_exceedances, simulate_exceedances, EStar, ExceedanceRecord};
use model_core::regime;
use quadrature::{
    default_spec, i1_decomposition, mean_exceedances_exact, pot_conditional_surrogate,
};
use rayon::prelude::*;
use sampling::RngStream;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "EDGELAB_WORKERS";

/// The in-memory output of one experiment run.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub records: Vec<ResultRecord>,
    pub summary: Vec<SummaryRow>,
    pub warnings: Vec<String>,
}

fn effective_workers(config: &ExperimentConfig) -> usize {
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                return n;
            }
        }
    }
    config
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs the configured experiment on a worker pool. Replicate `i` of grid
/// point `j` always draws from stream `j << 32 | i` of the master seed, and
/// records are collected in index order, so the output is byte-identical
/// for any worker count.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunArtifacts, HarnessError> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(effective_workers(config))
        .build()
        .map_err(|e| HarnessError::Threads(e.to_string()))?;
    pool.install(|| match config.experiment {
        ExperimentKind::Constants => run_constants(config),
        ExperimentKind::SimulateMax => run_simulate_max(config),
        ExperimentKind::SimulatePot => run_simulate_pot(config),
        ExperimentKind::VerifyIntegrals => run_verify_integrals(config),
        ExperimentKind::OracleCompare => run_oracle_compare(config),
    })
}

fn stream_id(grid_index: usize, replicate: u32) -> u64 {
    (grid_index as u64) << 32 | u64::from(replicate)
}

fn run_constants(config: &ExperimentConfig) -> Result<RunArtifacts, HarnessError> {
    let p = &config.params;
    let id = config.id();
    let reg = regime(p);
    let mut summary = vec![
        SummaryRow::bare(&id, 0.0, "theta", reg.theta),
        SummaryRow::bare(&id, 0.0, "gamma", reg.gamma),
        SummaryRow::bare(&id, 0.0, "omega_d", omega_d(p.d)),
        SummaryRow::bare(&id, 0.0, "k_constant", k_constant(p)?),
        SummaryRow::bare(&id, 0.0, "cn_constant", cn_constant(p)?),
        SummaryRow::bare(&id, 0.0, "kappa_beta", kappa_beta(p)?),
    ];
    for &n in &config.n_grid {
        summary.push(SummaryRow::bare(&id, n, "c_n", scaling_cn(n, p)?));
    }
    Ok(RunArtifacts {
        records: Vec::new(),
        summary,
        warnings: Vec::new(),
    })
}

fn exceedance_into_record(record: &mut ResultRecord, rec: &ExceedanceRecord) {
    record.f = Some(rec.f);
    match rec.e_star {
        EStar::Observed(len) => record.e_star = Some(len),
        EStar::Censored(level) => record.censored_at = Some(level),
    }
}

fn observation(record: &ResultRecord) -> Observation {
    match (record.e_star, record.censored_at) {
        (Some(len), _) => Observation::Observed(len),
        (None, Some(level)) => Observation::Censored(level),
        (None, None) => unreachable!("record without maximum"),
    }
}

fn run_simulate_max(config: &ExperimentConfig) -> Result<RunArtifacts, HarnessError> {
    let p = config.params;
    let id = config.id();
    let theta = regime(&p).theta;
    let r0 = config.r_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let spec = default_spec();
    let mut records = Vec::new();
    let mut summary = Vec::new();
    for (ni, &n) in config.n_grid.iter().enumerate() {
        let c_n = scaling_cn(n, &p)?;
        let threshold = c_n * r0;
        let batch: Vec<Result<ResultRecord, HarnessError>> = (0..config.replicates)
            .into_par_iter()
            .map(|rep| {
                let sid = stream_id(ni, rep);
                let mut rng = RngStream::new(config.master_seed, sid);
                let rec = simulate_exceedances(&p, n, threshold, &mut rng)?;
                let mut record = ResultRecord::new(&id, &p, n, rep, sid);
                exceedance_into_record(&mut record, &rec);
                Ok(record)
            })
            .collect();
        let batch: Vec<ResultRecord> = batch.into_iter().collect::<Result<_, _>>()?;

        let counts: Vec<u64> = batch.iter().map(|r| r.f.expect("count")).collect();
        let floats: Vec<f64> = counts.iter().map(|&k| k as f64).collect();
        let (mean, se) = mean_and_se(&floats)?;
        let exact = mean_exceedances_exact(n, threshold, &p, &spec)?.mean();
        summary.push(SummaryRow {
            experiment_id: id.clone(),
            n,
            metric: "mean_f".into(),
            value: mean,
            spread_lo: Some(mean - se),
            spread_hi: Some(mean + se),
            quadrature_ref: Some(exact),
            limit: Some(r0.powf(-theta)),
        });

        let scaled: Vec<Observation> = batch
            .iter()
            .map(|r| match observation(r) {
                Observation::Observed(v) => Observation::Observed(v / c_n),
                Observation::Censored(v) => Observation::Censored(v / c_n),
            })
            .collect();
        let ks = ks_distance(&scaled, |r| frechet_cdf(r, theta))?;
        summary.push(SummaryRow {
            experiment_id: id.clone(),
            n,
            metric: "ks_frechet".into(),
            value: ks,
            spread_lo: None,
            spread_hi: None,
            quadrature_ref: None,
            limit: Some(0.0),
        });

        let tv = empirical_tv_to_poisson(&counts, mean)?;
        summary.push(SummaryRow {
            experiment_id: id.clone(),
            n,
            metric: "tv_poisson".into(),
            value: tv,
            spread_lo: None,
            spread_hi: None,
            quadrature_ref: None,
            limit: Some(0.0),
        });
        summary.push(SummaryRow {
            experiment_id: id.clone(),
            n,
            metric: "dispersion".into(),
            value: dispersion_index(&counts).unwrap_or(f64::NAN),
            spread_lo: None,
            spread_hi: None,
            quadrature_ref: None,
            limit: Some(1.0),
        });
        records.extend(batch);
    }
    Ok(RunArtifacts {
        records,
        summary,
        warnings: Vec::new(),
    })
}

fn run_simulate_pot(config: &ExperimentConfig) -> Result<RunArtifacts, HarnessError> {
    let p = config.params;
    let id = config.id();
    let theta = regime(&p).theta;
    let exponent = config.cn_exponent.unwrap_or(1.5 * f64::from(p.d));
    let spec = default_spec();
    let mut records = Vec::new();
    let mut summary = Vec::new();
    let mut warnings = Vec::new();
    for (ni, &n) in config.n_grid.iter().enumerate() {
        let c_n = n.powf(exponent);
        let d_n = match config.hub_level_variant {
            HubLevelVariant::Pot => hub_level_dn(c_n, &p)?,
            HubLevelVariant::Plain => kappa_hub_level_dn(c_n, &p)?,
        };
        let batch: Vec<Result<(ResultRecord, PotReplicate), HarnessError>> = (0..config.replicates)
            .into_par_iter()
            .map(|rep| {
                let sid = stream_id(ni, rep);
                let mut rng = RngStream::new(config.master_seed, sid);
                let pot =
                    simulate_pot_conditional_at_level(&p, n, c_n, d_n, &config.t_grid, &mut rng)?;
                let mut record = ResultRecord::new(&id, &p, n, rep, sid);
                record.hub_count = Some(pot.hub_count);
                record.indicators = Some(pot.indicators.clone());
                match pot.max_length {
                    Some(len) => record.e_star = Some(len),
                    None => {
                        record.censored_at =
                            Some(pot_threshold_tn(c_n, min_t(&config.t_grid), theta))
                    }
                }
                Ok((record, pot))
            })
            .collect();
        let batch: Vec<(ResultRecord, PotReplicate)> =
            batch.into_iter().collect::<Result<_, _>>()?;

        if batch.iter().any(|(_, pot)| pot.growth_warning) {
            warnings.push(format!(
                "threshold growth condition looks unmet at n = {n}; the limit comparison is indicative only"
            ));
        }
        for (_, pot) in &batch {
            if pot.indicators.windows(2).any(|w| !w[0] && w[1]) {
                return Err(HarnessError::Invariant(
                    "peaks-over-threshold indicators must be decreasing along the grid".into(),
                ));
            }
        }
        for (ti, &t) in config.t_grid.iter().enumerate() {
            let hits = batch
                .iter()
                .filter(|(_, pot)| pot.indicators[ti])
                .count() as u64;
            let trials = batch.len() as u64;
            let (lo, hi) = wilson_interval(hits, trials, 2.576);
            let t_n = pot_threshold_tn(c_n, t, theta);
            let surrogate = pot_conditional_surrogate(n, t_n, d_n, &p, &spec)?;
            summary.push(SummaryRow {
                experiment_id: id.clone(),
                n,
                metric: format!("pot_t_{t}"),
                value: hits as f64 / trials as f64,
                spread_lo: Some(lo),
                spread_hi: Some(hi),
                quadrature_ref: Some(surrogate),
                limit: Some(gpd_tail(t, theta)),
            });
        }
        records.extend(batch.into_iter().map(|(r, _)| r));
    }
    Ok(RunArtifacts {
        records,
        summary,
        warnings,
    })
}

fn min_t(grid: &[f64]) -> f64 {
    grid.iter().copied().fold(f64::INFINITY, f64::min)
}

fn run_verify_integrals(config: &ExperimentConfig) -> Result<RunArtifacts, HarnessError> {
    let p = config.params;
    let id = config.id();
    let theta = regime(&p).theta;
    let r0 = config.r_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let spec = default_spec();
    let mut summary = Vec::new();
    for &n in &config.n_grid {
        let c_n = scaling_cn(n, &p)?;
        let r_n = c_n * r0;
        let exact = mean_exceedances_exact(n, r_n, &p, &spec)?;
        let decomposition = i1_decomposition(n, r_n, &p, &spec)?;
        let residual = (decomposition.reconstructed() - exact.i1).abs() / exact.i1;
        summary.push(SummaryRow {
            experiment_id: id.clone(),
            n,
            metric: "i1_over_limit".into(),
            value: exact.i1 / r0.powf(-theta),
            spread_lo: None,
            spread_hi: None,
            quadrature_ref: Some(exact.i1),
            limit: Some(1.0),
        });
        summary.push(SummaryRow::bare(
            &id,
            n,
            "decomposition_residual",
            residual,
        ));
    }
    Ok(RunArtifacts {
        records: Vec::new(),
        summary,
        warnings: Vec::new(),
    })
}

fn run_oracle_compare(config: &ExperimentConfig) -> Result<RunArtifacts, HarnessError> {
    let p = config.params;
    let id = config.id();
    let n = config.n_grid[0];
    let threshold = config.threshold.expect("validated");
    let cutoff = config.cutoff.expect("validated");
    let spec = default_spec();

    let run_arm = |arm_index: usize, name: &str| -> Result<Vec<ResultRecord>, HarnessError> {
        (0..config.replicates)
            .into_par_iter()
            .map(|rep| {
                let sid = stream_id(arm_index, rep);
                let mut rng = RngStream::new(config.master_seed, sid);
                let rec = if arm_index == 0 {
                    long_edge_engine::simulate_exceedances_truncated(
                        &p,
                        n,
                        threshold,
                        Some(cutoff),
                        &mut rng,
                    )?
                } else {
                    brute_force_exceedances(&p, n, threshold, cutoff, 10_000_000, &mut rng)?
                };
                let mut record = ResultRecord::new(&id, &p, n, rep, sid);
                record.arm = Some(name.to_string());
                exceedance_into_record(&mut record, &rec);
                Ok(record)
            })
            .collect()
    };
    let engine = run_arm(0, "engine")?;
    let brute = run_arm(1, "brute")?;

    let counts = |arm: &[ResultRecord]| -> Vec<u64> {
        arm.iter().map(|r| r.f.expect("count")).collect()
    };
    let (engine_counts, brute_counts) = (counts(&engine), counts(&brute));
    let truncated = quadrature::mean_exceedances_truncated(n, threshold, cutoff, &p, &spec)?;
    let mut summary = Vec::new();
    for (name, arm_counts) in [("engine", &engine_counts), ("brute", &brute_counts)] {
        let floats: Vec<f64> = arm_counts.iter().map(|&k| k as f64).collect();
        let (mean, se) = mean_and_se(&floats)?;
        summary.push(SummaryRow {
            experiment_id: id.clone(),
            n,
            metric: format!("mean_f_{name}"),
            value: mean,
            spread_lo: Some(mean - se),
            spread_hi: Some(mean + se),
            quadrature_ref: Some(truncated),
            limit: None,
        });
    }
    summary.push(SummaryRow::bare(
        &id,
        n,
        "tv_engine_brute",
        empirical_tv_between(&engine_counts, &brute_counts)?,
    ));

    let mut records = engine;
    records.extend(brute);
    Ok(RunArtifacts {
        records,
        summary,
        warnings: Vec::new(),
    })
}

/// Writes JSON-lines records and the CSV summary into `out_dir`, returning
/// the two paths.
pub fn write_artifacts(
    artifacts: &RunArtifacts,
    out_dir: &Path,
    id: &str,
) -> Result<(PathBuf, PathBuf), HarnessError> {
    std::fs::create_dir_all(out_dir)?;
    let records_path = out_dir.join(format!("{id}.jsonl"));
    let mut file = std::io::BufWriter::new(std::fs::File::create(&records_path)?);
    for record in &artifacts.records {
        serde_json::to_writer(&mut file, record)
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        file.write_all(b"\n")?;
    }
    file.flush()?;

    let summary_path = out_dir.join(format!("{id}-summary.csv"));
    let mut writer = csv::Writer::from_path(&summary_path)?;
    for row in &artifacts.summary {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok((records_path, summary_path))
}
