//! The far-neighbor mean `Phi`, the rooted conditional exceedance
//! probability `I_n`, the low-weight contribution `A_n`, the hub exceedance
//! mean `E[X_n]`, and the finite-size conditional excess surrogate.

use crate::{inner_spec, QuadratureError};
use analytics::{kappa_low, omega_d, psi_beta};
use model_core::{
    regime, require_unit_intensity, validate_params, ModelParams, Purpose, RegimeTag,
};
use quad_core::{integrate, integrate_to_inf, QuadratureSpec};
use statrs::function::gamma::gamma;

fn validated(p: &ModelParams) -> Result<(), QuadratureError> {
    require_unit_intensity(p)?;
    validate_params(p, Purpose::Generic)?;
    Ok(())
}

/// `Phi(w) = d omega_d int_{t_cut}^inf rho^{d-1} psi_beta(lambda w /
/// rho^alpha) drho` — the mean number of far vertices beyond distance
/// `t_cut` connected to a vertex of weight `w`.
pub fn phi_n(
    w: f64,
    t_cut: f64,
    p: &ModelParams,
    spec: &QuadratureSpec,
) -> Result<f64, QuadratureError> {
    assert!(w >= 1.0 && t_cut > 0.0);
    validated(p)?;
    let d = p.dim();
    let pre = d * omega_d(p.d);
    let lambda = p.lambda;
    let alpha = p.alpha;
    let beta = p.beta;
    // the psi argument crosses 1 at rho = (lambda w)^{1/alpha}
    let scale = t_cut.max((lambda * w).powf(1.0 / alpha));
    let q = integrate_to_inf(
        move |rho: f64| {
            rho.powf(d - 1.0) * psi_beta(lambda * w * rho.powf(-alpha), beta).expect("psi")
        },
        t_cut,
        scale,
        spec,
    )?;
    Ok(pre * q.value)
}

/// Printed leading term of `Phi(w)` for `t_cut` large.
pub fn phi_leading_term(w: f64, t_cut: f64, p: &ModelParams) -> Result<f64, QuadratureError> {
    validated(p)?;
    let d = p.dim();
    let reg = regime(p);
    let dom = d * omega_d(p.d);
    Ok(match reg.tag {
        RegimeTag::InfiniteMean => {
            dom * gamma(1.0 - p.beta) * (p.lambda * w).powf(p.beta) * t_cut.powf(-reg.theta)
                / reg.theta
        }
        RegimeTag::Borderline => {
            dom * p.lambda
                * w
                * t_cut.powf(-reg.theta)
                * ((t_cut.powf(p.alpha) / (p.lambda * w)).ln() / reg.theta
                    + p.alpha / (reg.theta * reg.theta))
        }
        RegimeTag::FiniteMean => {
            p.lambda * w * (p.beta / (p.beta - 1.0)) * dom * t_cut.powf(-reg.theta) / reg.theta
        }
    })
}

/// Scale hint for weight integrals: the rescaled weight `v` at which
/// `Phi(d_n v)` reaches order one, where the excess indicator saturates.
fn saturation_scale(phi_at_dn: f64, gamma_exp: f64) -> f64 {
    if phi_at_dn > 0.0 && phi_at_dn < 1.0 {
        (1.0 / phi_at_dn).powf(1.0 / gamma_exp).min(1e15)
    } else {
        1.0
    }
}

/// Rooted conditional exceedance probability
/// `I_n = beta d_n^beta int_{d_n}^inf (1 - e^{-Phi(w)}) w^{-beta-1} dw`,
/// using the identity `Phi int_0^1 e^{-s Phi} ds = 1 - e^{-Phi}`.
pub fn rooted_conditional_exact(
    t_n: f64,
    d_n: f64,
    p: &ModelParams,
    spec: &QuadratureSpec,
) -> Result<f64, QuadratureError> {
    assert!(t_n > 0.0 && d_n >= 1.0);
    validated(p)?;
    let inner = inner_spec(spec);
    let beta = p.beta;
    let params = *p;
    let f = move |v: f64| {
        let phi = phi_n(d_n * v, t_n, &params, &inner).expect("inner phi quadrature");
        -(-phi).exp_m1() * beta * v.powf(-beta - 1.0)
    };
    let phi1 = phi_n(d_n, t_n, p, &inner)?;
    let scale = saturation_scale(phi1, regime(p).gamma);
    Ok(integrate_to_inf(f, 1.0, scale, spec)?.value)
}

/// Two-path variant of [`rooted_conditional_exact`]: the inner
/// `int_0^1 e^{-s Phi} ds` is evaluated by quadrature instead of in closed
/// form.
pub fn rooted_conditional_double(
    t_n: f64,
    d_n: f64,
    p: &ModelParams,
    spec: &QuadratureSpec,
) -> Result<f64, QuadratureError> {
    assert!(t_n > 0.0 && d_n >= 1.0);
    validated(p)?;
    let inner = inner_spec(spec);
    let beta = p.beta;
    let params = *p;
    let f = move |v: f64| {
        let phi = phi_n(d_n * v, t_n, &params, &inner).expect("inner phi quadrature");
        let damp = integrate(move |s: f64| (-s * phi).exp(), 0.0, 1.0, &inner)
            .expect("inner damping quadrature")
            .value;
        phi * damp * beta * v.powf(-beta - 1.0)
    };
    let phi1 = phi_n(d_n, t_n, p, &inner)?;
    let scale = saturation_scale(phi1, regime(p).gamma);
    Ok(integrate_to_inf(f, 1.0, scale, spec)?.value)
}

/// Low-weight contribution `A_n = beta int_1^{d_n} (1 - e^{-Phi(w)})
/// w^{-beta-1} dw`.
pub fn an_exact(
    t_n: f64,
    d_n: f64,
    p: &ModelParams,
    spec: &QuadratureSpec,
) -> Result<f64, QuadratureError> {
    assert!(t_n > 0.0 && d_n >= 1.0);
    validated(p)?;
    if d_n == 1.0 {
        return Ok(0.0);
    }
    let inner = inner_spec(spec);
    let beta = p.beta;
    let params = *p;
    let f = move |w: f64| {
        let phi = phi_n(w, t_n, &params, &inner).expect("inner phi quadrature");
        -(-phi).exp_m1() * beta * w.powf(-beta - 1.0)
    };
    Ok(integrate(f, 1.0, d_n, spec)?.value)
}

/// Printed leading term of `A_n`.
pub fn an_predicted(t_n: f64, d_n: f64, p: &ModelParams) -> Result<f64, QuadratureError> {
    validated(p)?;
    let low = kappa_low(p)?;
    let d = p.dim();
    let reg = regime(p);
    Ok(match reg.tag {
        RegimeTag::InfiniteMean => {
            low.less.expect("regime constant") * t_n.powf(d - p.alpha * p.beta) * d_n.ln()
        }
        RegimeTag::Borderline => {
            low.equal.expect("regime constant")
                * t_n.powf(d - p.alpha)
                * (t_n.powf(p.alpha).ln() * d_n.ln() - 0.5 * d_n.ln().powi(2))
        }
        RegimeTag::FiniteMean => {
            low.greater.expect("regime constant")
                * t_n.powf(d - p.alpha)
                * (1.0 - d_n.powf(1.0 - p.beta))
        }
    })
}

/// Hub exceedance mean `E[X_n] = (2n)^d d omega_d int_{t_n}^inf rho^{d-1}
/// (int_{d_n}^inf psi_beta(lambda w / rho^alpha) beta w^{-beta-1} dw) drho`.
pub fn exn_exact(
    n: f64,
    t_n: f64,
    d_n: f64,
    p: &ModelParams,
    spec: &QuadratureSpec,
) -> Result<f64, QuadratureError> {
    assert!(n > 0.0 && t_n > 0.0 && d_n >= 1.0);
    validated(p)?;
    let d = p.dim();
    let pre = (2.0 * n).powi(p.d as i32) * d * omega_d(p.d);
    let inner = inner_spec(spec);
    let lambda = p.lambda;
    let alpha = p.alpha;
    let beta = p.beta;
    let weight_tail = d_n.powf(-beta);
    let f = move |rho: f64| {
        let x0 = lambda * d_n * rho.powf(-alpha);
        // rescaled weight integral: beta d_n^{-beta} int_1^inf
        // psi(x0 v) v^{-beta-1} dv
        let wq = integrate_to_inf(
            move |v: f64| psi_beta(x0 * v, beta).expect("psi") * beta * v.powf(-beta - 1.0),
            1.0,
            (1.0 / x0).max(1.0),
            &inner,
        )
        .expect("inner weight quadrature");
        rho.powf(d - 1.0) * weight_tail * wq.value
    };
    let scale = t_n.max((lambda * d_n).powf(1.0 / alpha));
    Ok(pre * integrate_to_inf(f, t_n, scale, spec)?.value)
}

/// Two-path variant of [`exn_exact`] with the integration order swapped:
/// `E[X_n] = (2n)^d d_n^{-beta} E_V[Phi(d_n V)]` for `V` Pareto.
pub fn exn_swapped(
    n: f64,
    t_n: f64,
    d_n: f64,
    p: &ModelParams,
    spec: &QuadratureSpec,
) -> Result<f64, QuadratureError> {
    assert!(n > 0.0 && t_n > 0.0 && d_n >= 1.0);
    validated(p)?;
    let mu = (2.0 * n).powi(p.d as i32) * d_n.powf(-p.beta);
    let inner = inner_spec(spec);
    let beta = p.beta;
    let params = *p;
    let f = move |v: f64| {
        phi_n(d_n * v, t_n, &params, &inner).expect("inner phi quadrature")
            * beta
            * v.powf(-beta - 1.0)
    };
    Ok(mu * integrate_to_inf(f, 1.0, 1.0, spec)?.value)
}

/// Printed leading term of `E[X_n]`.
pub fn exn_predicted(
    n: f64,
    t_n: f64,
    d_n: f64,
    p: &ModelParams,
) -> Result<f64, QuadratureError> {
    validated(p)?;
    let k = analytics::k_constant(p)?;
    let d = p.dim();
    let pre = k * (2.0 * n).powi(p.d as i32);
    Ok(match regime(p).tag {
        RegimeTag::InfiniteMean => {
            pre * t_n.powf(d - p.alpha * p.beta) * (t_n.powf(p.alpha) / d_n).ln()
        }
        RegimeTag::Borderline => {
            pre * t_n.powf(d - p.alpha) * (t_n.powf(p.alpha) / d_n).ln().powi(2)
        }
        RegimeTag::FiniteMean => pre * t_n.powf(d - p.alpha) * d_n.powf(1.0 - p.beta),
    })
}

/// Finite-size surrogate for the conditional excess probability
/// `P(e_n^* > t_n | max weight > d_n)` under the split into hub and non-hub
/// contributions:
///
/// * hubs: count `K` is zero-truncated Poisson(`mu`), each hub avoids a far
///   edge with probability `1 - I_n`, so the no-hub-edge chance is
///   `E[(1 - I_n)^K | K >= 1] = (e^{mu (1 - I_n)} - 1)/(e^mu - 1)`;
/// * non-hubs: the number of low-weight vertices with a far edge is Poisson
///   with mean `(2n)^d A_n`, contributing `exp(-(2n)^d A_n)`.
///
/// The two factors share the far vertex weights, so the product is a
/// (numerically excellent) approximation rather than an identity.
pub fn pot_conditional_surrogate(
    n: f64,
    t_n: f64,
    d_n: f64,
    p: &ModelParams,
    spec: &QuadratureSpec,
) -> Result<f64, QuadratureError> {
    validated(p)?;
    let volume = (2.0 * n).powi(p.d as i32);
    let mu = volume * d_n.powf(-p.beta);
    let i_n = rooted_conditional_exact(t_n, d_n, p, spec)?;
    let a_n = an_exact(t_n, d_n, p, spec)?;
    let hub_clear = (mu * (1.0 - i_n)).exp_m1() / mu.exp_m1();
    Ok(1.0 - hub_clear * (-volume * a_n).exp())
}
