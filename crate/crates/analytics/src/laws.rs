//! Limit laws: Fréchet, Poisson, generalized Pareto, the rooted excess law
//! `G_beta`, the max-weight closed form, and the Poisson-approximation
//! bound shape.

use crate::special::psi_beta;
use crate::AnalyticsError;
use model_core::{
    regime, require_unit_intensity, validate_params, ModelParams, Purpose, RegimeTag,
};
use quad_core::{integrate, integrate_to_inf, QuadratureSpec};
use statrs::function::gamma::{gamma, ln_gamma};

/// Fréchet CDF `exp(-r^{-theta})` for `r > 0`.
pub fn frechet_cdf(r: f64, theta: f64) -> f64 {
    assert!(r > 0.0 && theta > 0.0);
    (-r.powf(-theta)).exp()
}

/// Generalized Pareto tail `(1 + t/theta)^{-theta}` for `t >= 0`.
pub fn gpd_tail(t: f64, theta: f64) -> f64 {
    assert!(t >= 0.0 && theta > 0.0);
    (1.0 + t / theta).powf(-theta)
}

/// Poisson probability mass `e^{-mean} mean^k / k!`, evaluated in log space.
pub fn poisson_pmf(k: u64, mean: f64) -> f64 {
    assert!(mean >= 0.0);
    if mean == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let kf = k as f64;
    (kf * mean.ln() - mean - ln_gamma(kf + 1.0)).exp()
}

/// The excess-law scale `a_beta(t)`: a regime prefactor times
/// `(1 + t/theta)^{-theta}`.
pub fn a_beta(t: f64, p: &ModelParams) -> Result<f64, AnalyticsError> {
    assert!(t >= 0.0);
    require_unit_intensity(p)?;
    let reg = validate_params(p, Purpose::ConditionalPot)?;
    let gpd = gpd_tail(t, reg.theta);
    Ok(match reg.tag {
        RegimeTag::InfiniteMean => gpd / gamma(1.0 - p.beta),
        RegimeTag::Borderline => gpd,
        RegimeTag::FiniteMean => gpd * (p.beta - 1.0) / p.beta,
    })
}

/// Rooted excess law `G_beta(t) = beta int_1^inf (1 - e^{-a_beta(t) v^gamma})
/// v^{-beta-1} dv`, `gamma = min(1, beta)`, via closed form.
///
/// For `beta > 1` (`gamma = 1`) the integral is exactly `psi_beta(a)`. For
/// `beta <= 1` the substitution `u = a v^gamma` followed by integration by
/// parts reduces the integral to `a int_a^inf (1 - e^{-u}) u^{-2} du =
/// psi_1(a)` — so the tail carries a logarithmic correction to the
/// generalized Pareto shape throughout `beta <= 1`, not only at `beta = 1`.
pub fn g_beta_tail(t: f64, p: &ModelParams) -> Result<f64, AnalyticsError> {
    let a = a_beta(t, p)?;
    if p.beta > 1.0 {
        psi_beta(a, p.beta)
    } else {
        psi_beta(a, 1.0)
    }
}

/// Independent evaluation path for [`g_beta_tail`]: adaptive quadrature of
/// the defining integral, split where the integrand saturates.
pub fn g_beta_quadrature(
    t: f64,
    p: &ModelParams,
    spec: &QuadratureSpec,
) -> Result<f64, AnalyticsError> {
    let a = a_beta(t, p)?;
    if a == 0.0 {
        return Ok(0.0);
    }
    let gamma_exp = regime(p).gamma;
    let beta = p.beta;
    let f = move |v: f64| -(-a * v.powf(gamma_exp)).exp_m1() * beta * v.powf(-beta - 1.0);
    // the exponent a v^gamma reaches 1 at the saturation point
    let v_split = a.powf(-1.0 / gamma_exp).max(1.0);
    let mut total = 0.0;
    if v_split > 1.0 {
        total += integrate(f, 1.0, v_split, spec)?.value;
    }
    total += integrate_to_inf(f, v_split, v_split, spec)?.value;
    Ok(total)
}

/// Probability that no window weight exceeds `hub_level`: the exceedance
/// count is Poisson with mean `(2n)^d hub_level^{-beta}`; under the rooted
/// law the extra origin vertex contributes the factor `1 - hub_level^{-beta}`.
pub fn prob_max_weight_le(n: f64, d: u32, hub_level: f64, beta: f64, palm: bool) -> f64 {
    assert!(hub_level >= 1.0 && n > 0.0 && beta > 0.0);
    let tail = hub_level.powf(-beta);
    let base = (-(2.0 * n).powi(d as i32) * tail).exp();
    if palm {
        (1.0 - tail) * base
    } else {
        base
    }
}

/// The regime-dependent decay factor `iota_n` of the Poisson-approximation
/// bound.
pub fn iota_n(r_n: f64, p: &ModelParams) -> Result<f64, AnalyticsError> {
    assert!(r_n > 1.0);
    require_unit_intensity(p)?;
    let reg = validate_params(p, Purpose::Generic)?;
    let d = p.dim();
    Ok(match reg.tag {
        RegimeTag::InfiniteMean => {
            r_n.powf(d - p.alpha * p.beta) * (p.alpha * r_n.ln())
        }
        RegimeTag::Borderline => r_n.powf(d - p.alpha) * (p.alpha * r_n.ln()).powi(2),
        RegimeTag::FiniteMean => r_n.powf(d - p.alpha),
    })
}

/// Shape of the total-variation bound for the exceedance count:
/// `C min(1, 1/zeta) n^d iota_n^2`.
pub fn tv_bound_shape(
    n: f64,
    r_n: f64,
    p: &ModelParams,
    c: f64,
    zeta: f64,
) -> Result<f64, AnalyticsError> {
    assert!(n > 0.0 && c >= 0.0 && zeta > 0.0);
    let iota = iota_n(r_n, p)?;
    Ok(c * 1f64.min(1.0 / zeta) * n.powf(p.dim()) * iota * iota)
}
