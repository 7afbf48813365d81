//! The planted hub sampler and its multiplicity diagnostics.

use crate::HubError;
use model_core::ModelParams;
use rand::Rng;
use sampling::{
    sample_pareto_above, sample_pareto_below, sample_ppp, sample_zero_truncated_poisson,
    MarkedConfiguration, RngStream, Window,
};

/// Marked window configuration carrying at least one hub (weight above
/// `d_n`); `hub_indices` are exactly the indices with weight above the
/// level, all other weights lie at or below it.
#[derive(Debug, Clone)]
pub struct HubConfiguration {
    pub base: MarkedConfiguration,
    pub hub_indices: Vec<usize>,
    pub d_n: f64,
}

impl HubConfiguration {
    pub fn hub_count(&self) -> u64 {
        self.hub_indices.len() as u64
    }

    pub fn hub_weights(&self) -> Vec<f64> {
        self.hub_indices
            .iter()
            .map(|&i| self.base.weight(i))
            .collect()
    }

    /// The window configuration restricted to its hubs (same window).
    pub fn hubs_only(&self) -> MarkedConfiguration {
        let mut hubs = MarkedConfiguration::new(self.base.window);
        for &i in &self.hub_indices {
            hubs.push(self.base.point(i), self.base.weight(i));
        }
        hubs
    }
}

/// Mean number of hubs in the window: `rho (2n)^d d_n^{-beta}`.
pub fn hub_mean_intensity(p: &ModelParams, n: f64, d_n: f64) -> f64 {
    p.rho * (2.0 * n).powi(p.d as i32) * d_n.powf(-p.beta)
}

/// Probability of the hub event: `1 - e^{-mu}` with `mu` the hub mean.
pub fn hub_event_probability(p: &ModelParams, n: f64, d_n: f64) -> f64 {
    -(-hub_mean_intensity(p, n, d_n)).exp_m1()
}

/// Exact draw of the marked process in `[-n, n]^d` conditioned on at least
/// one vertex of weight above `d_n`.
///
/// The weight mark splits the process into two independent Poisson
/// processes: hubs (intensity thinned by `d_n^{-beta}`, weights Pareto
/// above `d_n`, i.e. `d_n` times a fresh Pareto) and non-hubs (intensity
/// thinned by `1 - d_n^{-beta}`, weights Pareto conditioned to
/// `[1, d_n]`). Conditioning only zero-truncates the hub count.
pub fn sample_conditioned_on_hub(
    p: &ModelParams,
    n: f64,
    d_n: f64,
    rng: &mut RngStream,
) -> Result<HubConfiguration, HubError> {
    if !(d_n > 1.0) {
        return Err(HubError::InvalidHubLevel { d_n });
    }
    let window = Window::new(p.d, n);
    let mut base = MarkedConfiguration::new(window);

    let mu = hub_mean_intensity(p, n, d_n);
    let hubs = sample_zero_truncated_poisson(mu, rng);
    for _ in 0..hubs {
        let point: Vec<f64> = (0..p.d).map(|_| n * (2.0 * rng.gen::<f64>() - 1.0)).collect();
        let weight = sample_pareto_above(p.beta, d_n, rng)?;
        base.push(&point, weight);
    }
    let hub_indices: Vec<usize> = (0..hubs as usize).collect();

    let low_rate = p.rho * (1.0 - d_n.powf(-p.beta));
    let coords = sample_ppp(window, low_rate, rng);
    for point in coords.chunks_exact(p.d as usize) {
        let weight = sample_pareto_below(p.beta, d_n, rng)?;
        base.push(point, weight);
    }

    Ok(HubConfiguration {
        base,
        hub_indices,
        d_n,
    })
}

/// Empirical distribution of the hub count across replicates.
#[derive(Debug, Clone)]
pub struct HubMultiplicity {
    /// `pmf[k - 1]` estimates `P(K = k)`.
    pub pmf: Vec<f64>,
    pub mean: f64,
    pub prob_multiple: f64,
    pub mu: f64,
}

/// Samples `reps` hub configurations and tabulates the hub count; the
/// sampler makes the law analytic (zero-truncated Poisson), so this
/// validates that the end-to-end pipeline retains it.
pub fn hub_multiplicity_stats(
    p: &ModelParams,
    n: f64,
    d_n: f64,
    reps: u32,
    rng: &mut RngStream,
) -> Result<HubMultiplicity, HubError> {
    assert!(reps >= 1);
    let mut counts: Vec<u64> = Vec::new();
    let mut sum = 0.0f64;
    let mut multiple = 0u64;
    for _ in 0..reps {
        let k = sample_conditioned_on_hub(p, n, d_n, rng)?.hub_count();
        if counts.len() < k as usize {
            counts.resize(k as usize, 0);
        }
        counts[k as usize - 1] += 1;
        sum += k as f64;
        if k >= 2 {
            multiple += 1;
        }
    }
    let total = f64::from(reps);
    Ok(HubMultiplicity {
        pmf: counts.iter().map(|&c| c as f64 / total).collect(),
        mean: sum / total,
        prob_multiple: multiple as f64 / total,
        mu: hub_mean_intensity(p, n, d_n),
    })
}
