//! Dominated thinning of the far point process into exceedance edges.

use crate::envelope::build_envelope_default;
use crate::EngineError;
use model_core::ModelParams;
use rand::Rng;
use sampling::{sample_pareto, sample_poisson_count, sample_sphere_direction, MarkedConfiguration, RngStream};

/// One exceedance edge between a near vertex and a sampled far point.
#[derive(Debug, Clone, PartialEq)]
pub struct FarEdge {
    pub near_index: usize,
    pub far_point: Vec<f64>,
    pub far_weight: f64,
    pub length: f64,
}

/// All exceedance edges from the window to the far region in one replicate.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FarEdgeSet {
    pub edges: Vec<FarEdge>,
}

impl FarEdgeSet {
    pub fn count(&self) -> u64 {
        self.edges.len() as u64
    }

    pub fn max_length(&self) -> Option<f64> {
        self.edges
            .iter()
            .map(|e| e.length)
            .max_by(f64::total_cmp)
    }
}

/// Weight draw from the tilted density proportional to
/// `min(1, c v) beta v^{-beta-1}` on `[1, inf)`, by piecewise inverse CDF.
fn sample_tilted_weight(c: f64, beta: f64, rng: &mut RngStream) -> f64 {
    if c >= 1.0 {
        // min(1, c v) = 1 on the whole support: plain Pareto
        return sample_pareto(beta, rng);
    }
    debug_assert!(c > 0.0);
    let total = crate::psi_bar(c, beta);
    // mass of the linear piece v in [1, 1/c]
    let head = if (beta - 1.0).abs() < 1e-14 {
        c * (1.0 / c).ln()
    } else {
        beta * (c - c.powf(beta)) / (beta - 1.0)
    };
    let u: f64 = rng.gen::<f64>() * total;
    if u < head {
        if (beta - 1.0).abs() < 1e-14 {
            (u / c).exp()
        } else {
            (1.0 + u * (1.0 - beta) / (c * beta)).powf(1.0 / (1.0 - beta))
        }
    } else {
        // Pareto tail beyond 1/c with mass c^beta
        (total - u).powf(-1.0 / beta)
    }
}

/// Independent Bernoullis conditioned on at least one success, sampled
/// sequentially without rejection: while no success has occurred, the next
/// trial succeeds with probability `p_i / q_i`, where `q_i` is the
/// probability that some trial in `i..` succeeds; after the first success
/// the remaining trials are unconditioned.
pub fn conditional_nonempty_bernoulli(
    probs: &[f64],
    rng: &mut RngStream,
) -> Result<Vec<usize>, EngineError> {
    debug_assert!(probs.iter().all(|p| (0.0..=1.0).contains(p)));
    // accumulate P(any success in the suffix) directly — the recursion
    // q_i = p_i + q_{i+1} - p_i q_{i+1} keeps full precision even when all
    // the probabilities are far below machine epsilon
    let mut suffix_any = vec![0.0f64; probs.len() + 1];
    for i in (0..probs.len()).rev() {
        let q = suffix_any[i + 1];
        suffix_any[i] = probs[i] + q - probs[i] * q;
    }
    if !(suffix_any[0] > 0.0) {
        return Err(EngineError::AllZeroProbs);
    }
    let mut selected = Vec::new();
    let mut forced = true;
    for (i, &p) in probs.iter().enumerate() {
        let success = if forced {
            let some_success = suffix_any[i];
            some_success > 0.0 && rng.gen::<f64>() * some_success < p
        } else {
            rng.gen::<f64>() < p
        };
        if success {
            selected.push(i);
            forced = false;
        }
    }
    if selected.is_empty() {
        // unreachable under the suffix recursion; defensive for rounding
        return Err(EngineError::AllZeroProbs);
    }
    Ok(selected)
}

/// Exact sample of the exceedance edge set between `near` and the far
/// region, with the far region optionally truncated to the box
/// `[-cutoff, cutoff]^d` for oracle comparisons.
///
/// Candidates are drawn from the radial envelope (Poisson count, inverse-CDF
/// radius, uniform direction, tilted weight), accepted with probability
/// `(1 - e^{-lambda v T(y)}) / min(1, c(rho) v)`, and each accepted far
/// point draws its near neighbors as independent Bernoullis conditioned on
/// at least one edge.
pub fn sample_far_edges_truncated(
    near: &MarkedConfiguration,
    threshold: f64,
    cutoff: Option<f64>,
    p: &ModelParams,
    rng: &mut RngStream,
) -> Result<FarEdgeSet, EngineError> {
    if p.kernel != model_core::KernelKind::Standard {
        return Err(EngineError::UnsupportedKernel);
    }
    let envelope = build_envelope_default(near, threshold, p)?;
    let mut edges = Vec::new();
    if envelope.total_mass() <= 0.0 {
        return Ok(FarEdgeSet { edges });
    }
    let candidates = sample_poisson_count(p.rho * envelope.total_mass(), rng);
    let threshold2 = threshold * threshold;
    let mut eligible: Vec<(usize, f64)> = Vec::new();
    for _ in 0..candidates {
        let rho = envelope.sample_radius(rng.gen());
        let direction = sample_sphere_direction(near.window.d, rng);
        let y: Vec<f64> = direction.iter().map(|x| x * rho).collect();
        // the envelope over-covers: discard candidates inside the window or
        // beyond the truncation box (their true intensity is zero)
        if near.window.contains(&y) {
            continue;
        }
        if let Some(m) = cutoff {
            if y.iter().any(|x| x.abs() > m) {
                continue;
            }
        }
        let c = envelope.c_of_rho(rho);
        let v = sample_tilted_weight(c, p.beta, rng);
        eligible.clear();
        let mut t_sum = 0.0f64;
        for i in 0..near.len() {
            let dist2 = near.dist2_to(i, &y);
            if dist2 > threshold2 {
                let dist = dist2.sqrt();
                t_sum += near.weight(i) / dist.powf(p.alpha);
                eligible.push((i, dist));
            }
        }
        if eligible.is_empty() {
            continue;
        }
        let connect = -(-p.lambda * v * t_sum).exp_m1();
        let dominate = (c * v).min(1.0);
        let accept = connect / dominate;
        if accept > 1.0 + 1e-12 {
            return Err(EngineError::EnvelopeViolation { prob: accept });
        }
        if rng.gen::<f64>() >= accept {
            continue;
        }
        let probs: Vec<f64> = eligible
            .iter()
            .map(|&(i, dist)| {
                -(-p.lambda * near.weight(i) * v / dist.powf(p.alpha)).exp_m1()
            })
            .collect();
        for j in conditional_nonempty_bernoulli(&probs, rng)? {
            let (i, dist) = eligible[j];
            edges.push(FarEdge {
                near_index: i,
                far_point: y.clone(),
                far_weight: v,
                length: dist,
            });
        }
    }
    Ok(FarEdgeSet { edges })
}

/// [`sample_far_edges_truncated`] without a truncation box: the exact far
/// exceedance edge set of the infinite-volume model.
pub fn sample_far_edges(
    near: &MarkedConfiguration,
    threshold: f64,
    p: &ModelParams,
    rng: &mut RngStream,
) -> Result<FarEdgeSet, EngineError> {
    sample_far_edges_truncated(near, threshold, None, p, rng)
}
