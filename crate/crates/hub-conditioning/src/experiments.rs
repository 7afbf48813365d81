//! Experiments on hub-conditioned configurations: the hub exceedance count
//! `X_n`, the conditional peaks-over-threshold indicators, and the rooted
//! single-vertex variant.

use crate::config::{hub_event_probability, sample_conditioned_on_hub};
use crate::HubError;
use analytics::{growth_condition_ratio, hub_level_dn, pot_threshold_tn};
use long_edge_engine::sample_far_edges;
use model_core::{regime, ModelParams};
use rand::Rng;
use sampling::{sample_pareto_above, MarkedConfiguration, RngStream};

/// One conditional draw of the hub exceedance count.
#[derive(Debug, Clone)]
pub struct XnSample {
    /// Count of exceedance edges rooted at a hub, given `{W_n* > d_n}`.
    pub x_n: u64,
    pub hub_count: u64,
    pub hub_weights: Vec<f64>,
    /// `P(W_n* > d_n) = 1 - e^{-mu}`; multiplying the conditional mean of
    /// `x_n` by this recovers the unconditional mean.
    pub hub_probability: f64,
}

/// Far exceedance count of a fixed hub set: edges longer than `t_n` from
/// the hubs to the far region, sampled exactly by the engine.
pub fn x_n_given_hubs(
    hubs: &MarkedConfiguration,
    t_n: f64,
    p: &ModelParams,
    rng: &mut RngStream,
) -> Result<u64, HubError> {
    Ok(sample_far_edges(hubs, t_n, p, rng)?.count())
}

/// Samples the hub exceedance count `X_n` conditioned on `{W_n* > d_n}`:
/// plant a hub configuration, then count far edges (longer than `t_n`)
/// rooted at the hub vertices only.
pub fn simulate_x_n(
    p: &ModelParams,
    n: f64,
    t_n: f64,
    d_n: f64,
    rng: &mut RngStream,
) -> Result<XnSample, HubError> {
    assert!(t_n > n * f64::from(p.d).sqrt());
    let cfg = sample_conditioned_on_hub(p, n, d_n, rng)?;
    let hubs = cfg.hubs_only();
    let x_n = x_n_given_hubs(&hubs, t_n, p, rng)?;
    Ok(XnSample {
        x_n,
        hub_count: cfg.hub_count(),
        hub_weights: cfg.hub_weights(),
        hub_probability: hub_event_probability(p, n, d_n),
    })
}

/// One replicate of the conditional peaks-over-threshold experiment.
#[derive(Debug, Clone)]
pub struct PotReplicate {
    /// `indicators[i]` is whether the maximal exceedance edge length beats
    /// the threshold at `t_grid[i]`; decreasing along the grid.
    pub indicators: Vec<bool>,
    /// Maximal far edge length beyond the smallest grid threshold, if any.
    pub max_length: Option<f64>,
    pub hub_count: u64,
    pub d_n: f64,
    /// Set when the threshold growth condition looks unmet at this size.
    pub growth_warning: bool,
}

/// Conditional peaks-over-threshold replicate: plant a hub configuration at
/// the level paired with `c_n`, sample all edges longer than the smallest
/// grid threshold from the FULL window configuration, and report the
/// exceedance indicator at every grid point.
///
/// The grid thresholds are `t_n(t) = c_n^{1/theta}(1 + t/theta)`; the grid
/// must be increasing-sorted or the indicators are still correct but not
/// monotone in position.
pub fn simulate_pot_conditional(
    p: &ModelParams,
    n: f64,
    c_n: f64,
    t_grid: &[f64],
    rng: &mut RngStream,
) -> Result<PotReplicate, HubError> {
    let d_n = hub_level_dn(c_n, p)?;
    simulate_pot_conditional_at_level(p, n, c_n, d_n, t_grid, rng)
}

/// [`simulate_pot_conditional`] with an explicit hub level, for callers
/// choosing a different level convention than [`hub_level_dn`].
pub fn simulate_pot_conditional_at_level(
    p: &ModelParams,
    n: f64,
    c_n: f64,
    d_n: f64,
    t_grid: &[f64],
    rng: &mut RngStream,
) -> Result<PotReplicate, HubError> {
    if t_grid.is_empty() {
        return Err(HubError::EmptyGrid);
    }
    let theta = regime(p).theta;
    let thresholds: Vec<f64> = t_grid
        .iter()
        .map(|&t| pot_threshold_tn(c_n, t, theta))
        .collect();
    let base = thresholds.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(base > n * f64::from(p.d).sqrt());
    let growth_warning = growth_condition_ratio(n, base, p)? < 1.0;

    let cfg = sample_conditioned_on_hub(p, n, d_n, rng)?;
    let edges = sample_far_edges(&cfg.base, base, p, rng)?;
    let max_length = edges.max_length();
    let indicators = thresholds
        .iter()
        .map(|&t_n| max_length.is_some_and(|m| m > t_n))
        .collect();
    Ok(PotReplicate {
        indicators,
        max_length,
        hub_count: cfg.hub_count(),
        d_n,
        growth_warning,
    })
}

/// Rooted indicator with a caller-supplied far-neighbor mean `phi(w)`:
/// draws the root weight above `d_n` and flips `Bernoulli(1 - e^{-phi})`,
/// exact for the thinned far process seen from the root.
pub fn rooted_pot_simulate_with_phi(
    phi: impl FnOnce(f64) -> f64,
    d_n: f64,
    beta: f64,
    rng: &mut RngStream,
) -> Result<bool, HubError> {
    let w = sample_pareto_above(beta, d_n, rng)?;
    let connect = -(-phi(w)).exp_m1();
    Ok(rng.gen::<f64>() < connect)
}

/// Rooted peaks-over-threshold indicator `{e_0* > t_n}` given a root of
/// weight above `d_n`, with the far-neighbor mean evaluated by quadrature.
pub fn rooted_pot_simulate(
    p: &ModelParams,
    t_n: f64,
    d_n: f64,
    rng: &mut RngStream,
) -> Result<bool, HubError> {
    assert!(t_n > 0.0 && d_n >= 1.0);
    let spec = quadrature::default_spec();
    rooted_pot_simulate_with_phi(
        |w| quadrature::phi_n(w, t_n, p, &spec).expect("phi quadrature"),
        d_n,
        p.beta,
        rng,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use sampling::Window;

    fn stream(id: u64) -> RngStream {
        RngStream::new(0x90B0_7A11, id)
    }

    fn defaults() -> ModelParams {
        ModelParams::new(1, 1.5, 2.0, 1.0)
    }

    fn mean_and_se(samples: &[f64]) -> (f64, f64) {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        (mean, (var / n).sqrt())
    }

    #[test]
    fn single_hub_stratum_is_equidispersed_around_phi() {
        // one fixed hub: X_n is Poisson with mean phi(w)
        let p = defaults();
        let (w, t_n) = (40.0, 400.0);
        let phi = quadrature::phi_n(w, t_n, &p, &quadrature::default_spec()).unwrap();
        let mut hubs = MarkedConfiguration::new(Window::new(1, 0.5));
        hubs.push(&[0.3], w);
        let mut rng = stream(1);
        let samples: Vec<f64> = (0..10_000)
            .map(|_| x_n_given_hubs(&hubs, t_n, &p, &mut rng).unwrap() as f64)
            .collect();
        let (mean, se) = mean_and_se(&samples);
        assert!((mean - phi).abs() <= 3.0 * se, "mean {mean} vs phi {phi}");
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 1e4;
        // SE of a Poisson variance estimate: sqrt((m4 - var^2)/reps),
        // m4 = phi(1 + 3 phi) for Poisson
        let var_se = ((phi * (1.0 + 3.0 * phi) - phi * phi) / 1e4).sqrt();
        assert!((var - phi).abs() <= 3.0 * var_se, "var {var} vs phi {phi}");
    }

    #[test]
    fn unconditional_mean_matches_the_quadrature_oracle() {
        let p = defaults();
        let (n, t_n, d_n) = (5.0, 50.0, 5.0);
        let exact =
            quadrature::exn_exact(n, t_n, d_n, &p, &quadrature::default_spec()).unwrap();
        let mut rng = stream(2);
        let mut scaled = Vec::with_capacity(4000);
        for _ in 0..4000 {
            let s = simulate_x_n(&p, n, t_n, d_n, &mut rng).unwrap();
            scaled.push(s.x_n as f64 * s.hub_probability);
        }
        let (mean, se) = mean_and_se(&scaled);
        assert!(
            (mean - exact).abs() <= 3.0 * se,
            "unconditional mean {mean} vs exact {exact} (se {se})"
        );
    }

    #[test]
    fn vanishing_hub_probability_still_plants() {
        let p = defaults();
        let mut rng = stream(3);
        let s = simulate_x_n(&p, 2.0, 1e9, 1e9, &mut rng).unwrap();
        assert!(s.hub_count >= 1);
        assert!(s.hub_probability < 1e-15);
    }

    #[test]
    fn pot_indicators_are_monotone_and_anchored_at_zero() {
        let p = defaults();
        let (n, c_n) = (10.0, 31.6);
        let theta = regime(&p).theta;
        let grid = [0.0, 0.5, 1.0, 2.0, 4.0];
        let mut rng = stream(4);
        let mut seen_hit = false;
        for _ in 0..300 {
            let rep = simulate_pot_conditional(&p, n, c_n, &grid, &mut rng).unwrap();
            assert_eq!(rep.indicators.len(), grid.len());
            for pair in rep.indicators.windows(2) {
                assert!(pair[0] || !pair[1], "indicators must be decreasing");
            }
            let anchor = rep.max_length.is_some_and(|m| m > c_n.powf(1.0 / theta));
            assert_eq!(rep.indicators[0], anchor);
            seen_hit |= rep.indicators[0];
        }
        assert!(seen_hit, "grid should see at least one exceedance");
    }

    #[test]
    fn rooted_indicator_mean_matches_the_rooted_integral() {
        let p = defaults();
        let (t_n, d_n) = (1e4, 10.0);
        let exact =
            quadrature::rooted_conditional_exact(t_n, d_n, &p, &quadrature::default_spec())
                .unwrap();
        let mut rng = stream(5);
        let samples: Vec<f64> = (0..5000)
            .map(|_| rooted_pot_simulate(&p, t_n, d_n, &mut rng).unwrap() as u64 as f64)
            .collect();
        let (mean, se) = mean_and_se(&samples);
        assert!(
            (mean - exact).abs() <= 3.0 * se,
            "rooted mean {mean} vs exact {exact}"
        );
    }

    #[test]
    fn zero_phi_never_fires() {
        let mut rng = stream(6);
        for _ in 0..100 {
            assert!(!rooted_pot_simulate_with_phi(|_| 0.0, 2.0, 2.0, &mut rng).unwrap());
        }
    }
}
