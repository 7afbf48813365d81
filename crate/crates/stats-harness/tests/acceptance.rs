//! End-to-end acceptance suite: one test per criterion, each printing a
//! single summary line when it passes. Tolerances are pinned in the
//! assertions; seeds are pinned so every run is reproducible.

use std::time::Instant;

use analytics::{
    frechet_cdf, g_beta_tail, gpd_tail, hub_level_dn, pot_threshold_tn, prob_max_weight_le,
    psi_beta, psi_beta_quadrature, psi_quadrature_spec, scaling_cn,
};
use hub_conditioning::{hub_multiplicity_stats, rooted_pot_simulate, simulate_pot_conditional,
    simulate_x_n};
use long_edge_engine::{
    brute_force_exceedances, simulate_exceedances, simulate_exceedances_truncated, EStar,
    ExceedanceRecord,
};
use model_core::{regime, ModelParams};
use quadrature::{
    default_spec, exn_exact, i1_decomposition, i1_exact, mean_exceedances_exact,
    mean_exceedances_truncated, pot_conditional_surrogate, rooted_conditional_exact,
};
use sampling::{sample_pareto, sample_poisson_count, RngStream, Window};
use stats_harness::{
    dispersion_index, empirical_tv_between, empirical_tv_to_poisson, ks_distance, mean_and_se,
    wilson_interval, Observation,
};

fn defaults() -> ModelParams {
    ModelParams::new(1, 1.5, 2.0, 1.0)
}

/// Count threshold crossings of a simulated record at level `cut`,
/// including the near-near pairs the engine tallies separately.
fn count_above(rec: &ExceedanceRecord, cut: f64) -> u64 {
    rec.lengths.iter().filter(|&&l| l > cut).count() as u64 + rec.near_near_count
}

#[test]
fn criterion_01_weight_transform_two_path_agreement() {
    let start = Instant::now();
    let spec = psi_quadrature_spec();
    let betas = [0.3, 0.5, 0.9, 1.0, 1.5, 2.0, 3.0];
    // 45 log-spaced arguments spanning [1e-8, 1e3]
    let xs: Vec<f64> = (0..45)
        .map(|i| 10f64.powf(-8.0 + 11.0 * i as f64 / 44.0))
        .collect();
    let mut max_err = 0.0f64;
    for &beta in &betas {
        for &x in &xs {
            let closed = psi_beta(x, beta).unwrap();
            let quad = psi_beta_quadrature(x, beta, &spec).unwrap();
            let err = (closed - quad).abs() / closed.max(f64::MIN_POSITIVE);
            max_err = max_err.max(err);
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(max_err <= 1e-8, "max relative error {max_err:.3e} > 1e-8");
    assert!(elapsed < 10.0, "runtime {elapsed:.1}s over the 10s budget");
    println!("criterion 01 weight transform: PASS (max rel err {max_err:.2e}, {elapsed:.2}s)");
}

#[test]
fn criterion_02_decomposition_identity_across_regimes() {
    let start = Instant::now();
    let spec = default_spec();
    let (n, r_n) = (10.0, 1e4);
    // twelve points spanning all three regimes and several intensities
    let points = [
        (3.0, 0.5, 1.0),
        (2.5, 0.6, 0.5),
        (2.2, 0.7, 2.0),
        (1.8, 0.8, 1.0),
        (1.5, 1.0, 1.0),
        (2.0, 1.0, 0.5),
        (1.2, 1.0, 2.0),
        (1.5, 2.0, 1.0),
        (1.7, 3.0, 1.0),
        (1.2, 1.5, 0.5),
        (1.9, 1.1, 1.0),
        (1.6, 2.5, 2.0),
    ];
    let mut max_resid = 0.0f64;
    for (alpha, beta, lambda) in points {
        let p = ModelParams::new(1, alpha, beta, lambda);
        let i1 = i1_exact(n, r_n, &p, &spec).unwrap();
        let dec = i1_decomposition(n, r_n, &p, &spec).unwrap();
        let resid = (dec.reconstructed() - i1).abs() / i1;
        assert!(
            resid <= 1e-6,
            "residual {resid:.3e} > 1e-6 at alpha={alpha} beta={beta} lambda={lambda}"
        );
        max_resid = max_resid.max(resid);
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "runtime {elapsed:.1}s over the 1min budget");
    println!("criterion 02 decomposition identity: PASS (max residual {max_resid:.2e} over 12 points, {elapsed:.2}s)");
}

#[test]
fn criterion_03_engine_matches_brute_force() {
    let start = Instant::now();
    let p = defaults();
    let (n, threshold, cutoff) = (5.0, 15.0, 200.0);
    let reps = 20_000u32;
    let mut engine_f = Vec::with_capacity(reps as usize);
    let mut brute_f = Vec::with_capacity(reps as usize);
    for rep in 0..reps {
        let mut rng = RngStream::new(0xBBB8, rep as u64);
        let rec =
            simulate_exceedances_truncated(&p, n, threshold, Some(cutoff), &mut rng).unwrap();
        engine_f.push(rec.f);
        let mut rng = RngStream::new(0xBBB8 ^ 0xFFFF, rep as u64);
        let rec =
            brute_force_exceedances(&p, n, threshold, cutoff, 10_000_000, &mut rng).unwrap();
        brute_f.push(rec.f);
    }
    let tv = empirical_tv_between(&engine_f, &brute_f).unwrap();
    let exact = mean_exceedances_truncated(n, threshold, cutoff, &p, &default_spec()).unwrap();
    let as_f64 = |v: &[u64]| v.iter().map(|&k| k as f64).collect::<Vec<_>>();
    let (engine_mean, engine_se) = mean_and_se(&as_f64(&engine_f)).unwrap();
    let (brute_mean, brute_se) = mean_and_se(&as_f64(&brute_f)).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    assert!(tv <= 0.03, "TV {tv:.4} > 0.03");
    assert!(
        (engine_mean - exact).abs() <= 3.0 * engine_se,
        "engine mean {engine_mean:.4} vs exact {exact:.4} (se {engine_se:.4})"
    );
    assert!(
        (brute_mean - exact).abs() <= 3.0 * brute_se,
        "brute mean {brute_mean:.4} vs exact {exact:.4} (se {brute_se:.4})"
    );
    assert!(elapsed < 300.0, "runtime {elapsed:.1}s over the 5min budget");
    println!(
        "criterion 03 engine vs brute force: PASS (TV {tv:.4}, means {engine_mean:.4}/{brute_mean:.4} vs {exact:.4}, {elapsed:.1}s)"
    );
}

#[test]
fn criterion_04_mean_exceedances_match_quadrature() {
    let start = Instant::now();
    let p = defaults();
    let spec = default_spec();
    let mut report = String::new();
    for &n in &[20.0f64, 80.0] {
        let c_n = scaling_cn(n, &p).unwrap();
        let exact = mean_exceedances_exact(n, c_n, &p, &spec).unwrap().mean();
        let mut counts = Vec::with_capacity(10_000);
        for rep in 0..10_000u32 {
            let mut rng = RngStream::new(0xACC3_0004 + n as u64, rep as u64);
            let rec = simulate_exceedances(&p, n, c_n, &mut rng).unwrap();
            counts.push(rec.f as f64);
        }
        let (mean, se) = mean_and_se(&counts).unwrap();
        assert!(
            (mean - exact).abs() <= 3.0 * se,
            "n={n}: mean {mean:.4} vs quadrature {exact:.4} (se {se:.4})"
        );
        report.push_str(&format!("n={n}: {mean:.4} vs {exact:.4}; "));
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 600.0, "runtime {elapsed:.1}s over the 10min budget");
    println!("criterion 04 mean exceedances: PASS ({report}{elapsed:.1}s)");
}

#[test]
fn criterion_05_scaled_first_moment_approaches_the_power_law() {
    let start = Instant::now();
    let spec = default_spec();
    // one parameter set per regime; higher dimension tames the logarithmic
    // finite-size corrections enough to reach the 15% band by n = 1e6
    let cases = [
        ("infinite-mean", ModelParams::new(8, 32.0, 0.5, 1.0), 0.5),
        ("borderline", ModelParams::new(10, 20.0, 1.0, 1.0), 0.3),
        ("finite-mean", ModelParams::new(1, 1.5, 2.0, 1.0), 1.0),
    ];
    for (label, p, r) in cases {
        let theta = regime(&p).theta;
        let ratios: Vec<f64> = [1e3, 1e4, 1e5, 1e6]
            .iter()
            .map(|&n| {
                let c_n = scaling_cn(n, &p).unwrap();
                let i1 = i1_exact(n, c_n * r, &p, &spec).unwrap();
                i1 / r.powf(-theta)
            })
            .collect();
        let gap_last = (ratios[3] - 1.0).abs();
        for pair in ratios.windows(2) {
            assert!(
                (pair[1] - 1.0).abs() <= (pair[0] - 1.0).abs() + 1e-12,
                "{label}: ratios {ratios:?} not monotone toward 1"
            );
        }
        assert!(
            gap_last <= 0.15,
            "{label}: final ratio {:.4} outside the 15% band",
            ratios[3]
        );
        println!("criterion 05 [{label}]: ratios {ratios:?}");
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "runtime {elapsed:.1}s over the 1min budget");
    println!("criterion 05 asymptotic first moment: PASS ({elapsed:.2}s)");
}

#[test]
fn criterion_06_unconditional_hub_mean_matches_quadrature() {
    let start = Instant::now();
    let p = defaults();
    let spec = default_spec();
    let n = 50.0;
    let c_n = scaling_cn(n, &p).unwrap();
    let d_n = hub_level_dn(c_n, &p).unwrap();
    let exact = exn_exact(n, c_n, d_n, &p, &spec).unwrap();
    let mut scaled = Vec::with_capacity(10_000);
    for rep in 0..10_000u32 {
        let mut rng = RngStream::new(0xACC3_0006, rep as u64);
        let s = simulate_x_n(&p, n, c_n, d_n, &mut rng).unwrap();
        scaled.push(s.x_n as f64 * s.hub_probability);
    }
    let (mean, se) = mean_and_se(&scaled).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        (mean - exact).abs() <= 3.0 * se,
        "unconditional mean {mean:.4e} vs quadrature {exact:.4e} (se {se:.4e})"
    );
    assert!(elapsed < 600.0, "runtime {elapsed:.1}s over the 10min budget");
    println!(
        "criterion 06 hub mean: PASS (mean {mean:.4e} vs quadrature {exact:.4e}, {elapsed:.1}s)"
    );
}

/// Simulate the scaled maximum at the pinned seed, censoring below
/// `0.05 c_n` so the tail above the censor level is exact.
fn scaled_max_sample(
    p: &ModelParams,
    n: f64,
    c_n: f64,
    seed: u64,
    reps: u32,
) -> (Vec<Observation>, Vec<u64>) {
    let probe = 0.05 * c_n;
    let mut obs = Vec::with_capacity(reps as usize);
    let mut counts = Vec::with_capacity(reps as usize);
    for rep in 0..reps {
        let mut rng = RngStream::new(seed, rep as u64);
        let rec = simulate_exceedances(p, n, probe, &mut rng).unwrap();
        obs.push(match rec.e_star {
            EStar::Observed(v) => Observation::Observed(v / c_n),
            EStar::Censored(v) => Observation::Censored(v / c_n),
        });
        counts.push(count_above(&rec, c_n));
    }
    (obs, counts)
}

#[test]
fn criterion_07_frechet_distance_shrinks_along_the_grid() {
    let start = Instant::now();
    let p = defaults();
    let theta = regime(&p).theta;
    let mut distances = Vec::new();
    for &n in &[25.0f64, 50.0, 100.0] {
        let c_n = scaling_cn(n, &p).unwrap();
        let (obs, _) = scaled_max_sample(&p, n, c_n, 7, 2000);
        let ks = ks_distance(&obs, |r| frechet_cdf(r, theta)).unwrap();
        distances.push(ks);
    }
    let elapsed = start.elapsed().as_secs_f64();
    for pair in distances.windows(2) {
        assert!(
            pair[1] < pair[0],
            "KS sequence {distances:?} is not strictly decreasing"
        );
    }
    let last = *distances.last().unwrap();
    assert!(last <= 0.1, "final KS {last:.4} > 0.1");
    assert!(elapsed < 1200.0, "runtime {elapsed:.1}s over the 20min budget");
    println!("criterion 07 limit-law trend: PASS (KS {distances:?}, {elapsed:.1}s)");
}

#[test]
fn criterion_08_counts_stay_poisson_like() {
    let start = Instant::now();
    let p = defaults();
    let mut tvs = Vec::new();
    let mut final_disp = 0.0;
    for &n in &[25.0f64, 50.0, 100.0] {
        let c_n = scaling_cn(n, &p).unwrap();
        let (_, counts) = scaled_max_sample(&p, n, c_n, 3, 2000);
        let mean = counts.iter().map(|&k| k as f64).sum::<f64>() / counts.len() as f64;
        tvs.push(empirical_tv_to_poisson(&counts, mean).unwrap());
        final_disp = dispersion_index(&counts).unwrap();
    }
    let elapsed = start.elapsed().as_secs_f64();
    for pair in tvs.windows(2) {
        assert!(pair[1] < pair[0], "TV sequence {tvs:?} is not decreasing");
    }
    let last = *tvs.last().unwrap();
    assert!(last <= 0.1, "final TV {last:.4} > 0.1");
    assert!(
        (0.8..=1.2).contains(&final_disp),
        "dispersion {final_disp:.4} outside [0.8, 1.2]"
    );
    println!(
        "criterion 08 count structure: PASS (TV {tvs:?}, dispersion {final_disp:.4}, {elapsed:.1}s)"
    );
}

#[test]
fn criterion_09_rooted_tail_reaches_the_limit_curve() {
    let start = Instant::now();
    let p = defaults();
    let spec = default_spec();
    let theta = regime(&p).theta;
    let grid = [1e2f64, 1e3, 1e4, 1e5];
    let mut last_ratios = Vec::new();
    for &t in &[0.5f64, 1.0, 2.0] {
        let ratios: Vec<f64> = grid
            .iter()
            .map(|&n| {
                let c_n = n.powf(1.5);
                let d_n = hub_level_dn(c_n, &p).unwrap();
                let t_n = pot_threshold_tn(c_n, t, theta);
                let i_n = rooted_conditional_exact(t_n, d_n, &p, &spec).unwrap();
                i_n / g_beta_tail(t, &p).unwrap()
            })
            .collect();
        let gap = (ratios[3] - 1.0).abs();
        assert!(gap <= 0.05, "t={t}: final ratio {:.6} off by more than 5%", ratios[3]);
        last_ratios.push(ratios[3]);
    }
    // Monte Carlo cross-check of the same integral at the largest size
    let (n, t) = (1e5f64, 1.0);
    let c_n = n.powf(1.5);
    let d_n = hub_level_dn(c_n, &p).unwrap();
    let t_n = pot_threshold_tn(c_n, t, theta);
    let i_n = rooted_conditional_exact(t_n, d_n, &p, &spec).unwrap();
    let reps = 100_000u32;
    let mut rng = RngStream::new(0xACC3_0009, 0);
    let hits = (0..reps)
        .filter(|_| rooted_pot_simulate(&p, t_n, d_n, &mut rng).unwrap())
        .count();
    let p_hat = hits as f64 / reps as f64;
    let sigma = (i_n * (1.0 - i_n) / reps as f64).sqrt();
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        (p_hat - i_n).abs() <= 3.0 * sigma,
        "rooted MC {p_hat:.5} vs quadrature {i_n:.5} (sigma {sigma:.5})"
    );
    assert!(elapsed < 300.0, "runtime {elapsed:.1}s over the 5min budget");
    println!(
        "criterion 09 rooted tail: PASS (ratios {last_ratios:?}, MC {p_hat:.4} vs {i_n:.4}, {elapsed:.1}s)"
    );
}

#[test]
fn criterion_10_conditional_exceedance_curve() {
    let start = Instant::now();
    let p = defaults();
    let spec = default_spec();
    let theta = regime(&p).theta;
    let n = 3e4f64;
    let c_n = n.powf(1.5);
    let d_n = hub_level_dn(c_n, &p).unwrap();
    let t_grid = [4.0f64, 6.0, 8.0];
    let reps = 10_000u32;
    let mut hits = [0u64; 3];
    for rep in 0..reps {
        let mut rng = RngStream::new(0xACC3_0010, rep as u64);
        let r = simulate_pot_conditional(&p, n, c_n, &t_grid, &mut rng).unwrap();
        for (h, &fired) in hits.iter_mut().zip(&r.indicators) {
            *h += u64::from(fired);
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let mut report = String::new();
    for (i, &t) in t_grid.iter().enumerate() {
        let t_n = pot_threshold_tn(c_n, t, theta);
        let surrogate = pot_conditional_surrogate(n, t_n, d_n, &p, &spec).unwrap();
        let (lo, hi) = wilson_interval(hits[i], reps as u64, 2.576);
        assert!(
            (lo..=hi).contains(&surrogate),
            "t={t}: surrogate {surrogate:.4} outside Wilson 99% CI [{lo:.4}, {hi:.4}]"
        );
        let p_hat = hits[i] as f64 / reps as f64;
        let gpd = gpd_tail(t, theta);
        assert!(
            (p_hat - gpd).abs() <= 0.1,
            "t={t}: empirical {p_hat:.4} vs limit curve {gpd:.4} gap > 0.1"
        );
        report.push_str(&format!("t={t}: {p_hat:.4}~{surrogate:.4} (limit {gpd:.4}); "));
    }
    assert!(elapsed < 900.0, "runtime {elapsed:.1}s over the 15min budget");
    println!("criterion 10 conditional curve: PASS ({report}{elapsed:.1}s)");
}

#[test]
fn criterion_11_conditioned_hub_is_almost_surely_unique() {
    let start = Instant::now();
    let p = defaults();
    // mu = (2n)^d d_n^{-beta} = 10 / 1000 = 0.01
    let (n, d_n) = (5.0, 1000.0f64.sqrt());
    let mut rng = RngStream::new(0xACC3_0011, 0);
    let stats = hub_multiplicity_stats(&p, n, d_n, 10_000, &mut rng).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    assert!((stats.mu - 0.01).abs() < 1e-12, "mu {:.6} != 0.01", stats.mu);
    assert!(
        stats.prob_multiple <= 0.02,
        "P(>=2 hubs | >=1) = {:.4} > 0.02",
        stats.prob_multiple
    );
    println!(
        "criterion 11 hub uniqueness: PASS (P(>=2|>=1) = {:.4}, {elapsed:.2}s)",
        stats.prob_multiple
    );
}

#[test]
fn criterion_12_palm_max_weight_closed_form() {
    let start = Instant::now();
    let p = defaults();
    // non-rare point: (2n)^d = 10 and d_n^{-beta} = 0.01
    let (n, d_n) = (5.0, 10.0);
    let closed = prob_max_weight_le(n, p.d, d_n, p.beta, true);
    let volume = Window::new(p.d, n).volume();
    let reps = 100_000u32;
    let mut rng = RngStream::new(0xACC3_0012, 0);
    let mut below = 0u64;
    for _ in 0..reps {
        let origin_ok = sample_pareto(p.beta, &mut rng) <= d_n;
        let count = sample_poisson_count(volume, &mut rng);
        let rest_ok = (0..count).all(|_| sample_pareto(p.beta, &mut rng) <= d_n);
        below += u64::from(origin_ok && rest_ok);
    }
    let p_hat = below as f64 / reps as f64;
    let sigma = (closed * (1.0 - closed) / reps as f64).sqrt();
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        (p_hat - closed).abs() <= 3.0 * sigma,
        "MC {p_hat:.5} vs closed form {closed:.5} (sigma {sigma:.5})"
    );
    println!(
        "criterion 12 max-weight law: PASS (MC {p_hat:.4} vs closed form {closed:.4}, {elapsed:.2}s)"
    );
}

#[test]
fn criterion_13_output_is_byte_identical_across_worker_counts() {
    use stats_harness::{run_experiment, write_artifacts, ExperimentConfig, ExperimentKind};
    let start = Instant::now();
    let config = |workers: usize| ExperimentConfig {
        experiment: ExperimentKind::SimulateMax,
        params: defaults(),
        experiment_id: Some("acceptance-repro".into()),
        n_grid: vec![10.0, 20.0],
        replicates: 50,
        r_grid: vec![1.0],
        t_grid: vec![],
        cn_exponent: None,
        hub_level_variant: Default::default(),
        master_seed: 0xACC3_0013,
        workers: Some(workers),
        threshold: None,
        cutoff: None,
    };
    let base = std::env::temp_dir().join("edgelab-acceptance-repro");
    let mut outputs = Vec::new();
    for workers in [1usize, 4] {
        let artifacts = run_experiment(&config(workers)).unwrap();
        let dir = base.join(format!("workers-{workers}"));
        let (records_path, _) = write_artifacts(&artifacts, &dir, "acceptance-repro").unwrap();
        outputs.push(std::fs::read(records_path).unwrap());
    }
    std::fs::remove_dir_all(&base).ok();
    let elapsed = start.elapsed().as_secs_f64();
    assert!(!outputs[0].is_empty(), "no records were written");
    assert_eq!(
        outputs[0], outputs[1],
        "JSON-lines output differs between 1 and 4 workers"
    );
    println!(
        "criterion 13 reproducibility: PASS ({} identical bytes, {elapsed:.2}s)",
        outputs[0].len()
    );
}
