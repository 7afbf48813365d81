//! Replicate-level exceedance records: the count `F`, the sorted edge
//! lengths, the maximum `e_n*` (censored when nothing exceeds the probe
//! threshold), and the brute-force oracle.

use crate::sampler::{sample_far_edges_truncated, FarEdgeSet};
use crate::EngineError;
use model_core::{connection_prob, validate_params, ModelParams, Purpose};
use rand::Rng;
use sampling::{sample_marked_configuration, MarkedConfiguration, RngStream, Window};

/// Maximum exceedance edge length, or the censoring level when no edge
/// exceeds the probe threshold. `P(e_n* <= r)` for `r` at or above the
/// probe level is still determined exactly: it is the probability that no
/// edge exceeds `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EStar {
    Observed(f64),
    Censored(f64),
}

impl EStar {
    /// Whether the (possibly unobserved) maximum exceeds `r`; valid for
    /// `r >= ` the censoring level.
    pub fn exceeds(&self, r: f64) -> bool {
        match *self {
            EStar::Observed(len) => len > r,
            EStar::Censored(level) => {
                debug_assert!(r >= level, "censored record queried below its level");
                false
            }
        }
    }
}

/// One replicate's exceedance summary.
#[derive(Debug, Clone, PartialEq)]
pub struct ExceedanceRecord {
    /// Total exceedance edges touching the window: far edges plus
    /// near-near pairs.
    pub f: u64,
    /// Far-edge lengths, ascending.
    pub lengths: Vec<f64>,
    pub e_star: EStar,
    pub near_near_count: u64,
}

/// Assembles a record from a far edge set and the near-near enumeration.
pub fn exceedance_record_from_parts(
    far: FarEdgeSet,
    near_near_count: u64,
    near_near_max: Option<f64>,
    threshold: f64,
) -> ExceedanceRecord {
    let mut lengths: Vec<f64> = far.edges.iter().map(|e| e.length).collect();
    lengths.sort_by(f64::total_cmp);
    let max = lengths
        .last()
        .copied()
        .into_iter()
        .chain(near_near_max)
        .max_by(f64::total_cmp);
    ExceedanceRecord {
        f: far.count() + near_near_count,
        e_star: match max {
            Some(len) => EStar::Observed(len),
            None => EStar::Censored(threshold),
        },
        lengths,
        near_near_count,
    }
}

/// Bernoulli edge between two marked vertices at a known distance.
fn edge_occurs(
    dist: f64,
    w1: f64,
    w2: f64,
    p: &ModelParams,
    rng: &mut RngStream,
) -> Result<bool, EngineError> {
    let prob = connection_prob(dist, w1, w2, p)?;
    Ok(rng.gen::<f64>() < prob)
}

/// Enumerates near-near exceedance pairs (each unordered pair once); only
/// possible when the threshold is below the window diameter.
fn near_near_exceedances(
    near: &MarkedConfiguration,
    threshold: f64,
    p: &ModelParams,
    rng: &mut RngStream,
) -> Result<(u64, Option<f64>), EngineError> {
    let diameter = 2.0 * near.window.circumradius();
    if threshold >= diameter {
        return Ok((0, None));
    }
    let threshold2 = threshold * threshold;
    let mut count = 0u64;
    let mut max: Option<f64> = None;
    for i in 0..near.len() {
        for j in (i + 1)..near.len() {
            let dist2 = near.dist2_to(i, near.point(j));
            if dist2 <= threshold2 {
                continue;
            }
            let dist = dist2.sqrt();
            if edge_occurs(dist, near.weight(i), near.weight(j), p, rng)? {
                count += 1;
                max = Some(max.map_or(dist, |m: f64| m.max(dist)));
            }
        }
    }
    Ok((count, max))
}

/// Samples one replicate of the model in `[-n, n]^d` and returns its
/// exceedance record at the given threshold, with the far region optionally
/// truncated to `[-cutoff, cutoff]^d` for oracle comparisons.
pub fn simulate_exceedances_truncated(
    p: &ModelParams,
    n: f64,
    threshold: f64,
    cutoff: Option<f64>,
    rng: &mut RngStream,
) -> Result<ExceedanceRecord, EngineError> {
    validate_params(p, Purpose::Generic)?;
    let near = sample_marked_configuration(p, n, rng);
    let far = sample_far_edges_truncated(&near, threshold, cutoff, p, rng)?;
    let (nn_count, nn_max) = near_near_exceedances(&near, threshold, p, rng)?;
    Ok(exceedance_record_from_parts(far, nn_count, nn_max, threshold))
}

/// [`simulate_exceedances_truncated`] for the untruncated model.
pub fn simulate_exceedances(
    p: &ModelParams,
    n: f64,
    threshold: f64,
    rng: &mut RngStream,
) -> Result<ExceedanceRecord, EngineError> {
    simulate_exceedances_truncated(p, n, threshold, None, rng)
}

/// Brute-force oracle: samples the full marked process in `[-M, M]^d` and
/// enumerates every pair with at least one endpoint in `[-n, n]^d`,
/// flipping one Bernoulli edge per pair. Its law equals
/// [`simulate_exceedances_truncated`] with the same cutoff.
pub fn brute_force_exceedances(
    p: &ModelParams,
    n: f64,
    threshold: f64,
    cutoff_m: f64,
    budget: u64,
    rng: &mut RngStream,
) -> Result<ExceedanceRecord, EngineError> {
    validate_params(p, Purpose::Generic)?;
    assert!(cutoff_m >= n, "window must sit inside the sampling box");
    let expected = p.rho * (2.0 * cutoff_m).powi(p.d as i32);
    if expected > budget as f64 {
        return Err(EngineError::TooLarge { expected, budget });
    }
    let all = sample_marked_configuration(p, cutoff_m, rng);
    let window = Window::new(p.d, n);
    let near: Vec<usize> = (0..all.len())
        .filter(|&i| window.contains(all.point(i)))
        .collect();
    let is_near: Vec<bool> = (0..all.len()).map(|i| window.contains(all.point(i))).collect();
    let threshold2 = threshold * threshold;
    let mut far_lengths = Vec::new();
    let mut nn_count = 0u64;
    let mut nn_max: Option<f64> = None;
    for &i in &near {
        for j in 0..all.len() {
            if j == i || (is_near[j] && j < i) {
                continue; // each unordered pair exactly once
            }
            let dist2 = all.dist2_to(i, all.point(j));
            if dist2 <= threshold2 {
                continue;
            }
            let dist = dist2.sqrt();
            if edge_occurs(dist, all.weight(i), all.weight(j), p, rng)? {
                if is_near[j] {
                    nn_count += 1;
                    nn_max = Some(nn_max.map_or(dist, |m: f64| m.max(dist)));
                } else {
                    far_lengths.push(dist);
                }
            }
        }
    }
    far_lengths.sort_by(f64::total_cmp);
    let max = far_lengths
        .last()
        .copied()
        .into_iter()
        .chain(nn_max)
        .max_by(f64::total_cmp);
    Ok(ExceedanceRecord {
        f: far_lengths.len() as u64 + nn_count,
        e_star: match max {
            Some(len) => EStar::Observed(len),
            None => EStar::Censored(threshold),
        },
        lengths: far_lengths,
        near_near_count: nn_count,
    })
}
