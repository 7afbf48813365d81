//! The mean exceedance count `I_1` (with the `I_2 = 0` geometry guard), its
//! exact decomposition `I_1 = -I_1^(A) + I_1^(B)`, a box-truncated variant
//! matching the brute-force oracle, and the printed leading terms.

use crate::{inner_spec, QuadratureError};
use analytics::omega_d;
use model_core::{
    regime, require_unit_intensity, validate_params, ModelParams, Purpose, RegimeTag,
};
use quad_core::{integrate, integrate_to_inf, QuadratureSpec};
use statrs::function::gamma::{gamma, gamma_lr};

/// `chi(a) = E[1 - e^{-a W W'}]` for two independent Pareto weights, via the
/// product density `beta^2 u^{-beta-1} log u` on `[1, inf)`.
pub fn chi_product_tail(
    a: f64,
    beta: f64,
    spec: &QuadratureSpec,
) -> Result<f64, QuadratureError> {
    assert!(a >= 0.0 && beta > 0.0);
    if a == 0.0 {
        return Ok(0.0);
    }
    if a < 1e-30 {
        // the integrand underflows long before the adaptive grid can see
        // it; switch to the closed small-argument expansion, whose
        // neglected terms are relatively O(a^min(|1-beta|, 1) log a)
        return Ok(chi_small_argument(a, beta));
    }
    let scale = (1.0 / a).max(1.0);
    let q = integrate_to_inf(
        move |u| -(-a * u).exp_m1() * beta * beta * u.powf(-beta - 1.0) * u.ln(),
        1.0,
        scale,
        spec,
    )?;
    Ok(q.value.min(1.0))
}

/// Small-argument expansion of `chi(a)`, by Mellin asymptotics of the
/// product-weight tail integral:
///
/// * `beta != 1`, `beta < 2`:
///   `chi = beta^2 [a^beta (Gamma(1-beta)/beta log(1/a) + B) + a/(1-beta)^2]`
///   with `B = Gamma(1-beta)(beta psi(1-beta) + 1)/beta^2`;
/// * `beta = 1`: `chi = a [log^2(1/a)/2 + (1-g) log(1/a) + 1 - g + g^2/2 +
///   pi^2/12]` with `g` the Euler constant;
/// * `beta >= 2`: the `a^beta` correction drops below the neglected `a^2`
///   order, leaving `chi = beta^2 a/(beta-1)^2`.
fn chi_small_argument(a: f64, beta: f64) -> f64 {
    use statrs::function::gamma::digamma;
    if a == 0.0 {
        // underflowed argument: chi(0) = 0, and the expansion below would
        // produce 0 * ln(0) = NaN
        return 0.0;
    }
    let ell = -a.ln();
    if (beta - 1.0).abs() < 1e-12 {
        let g = statrs::consts::EULER_MASCHERONI;
        let pi2_12 = std::f64::consts::PI * std::f64::consts::PI / 12.0;
        a * (0.5 * ell * ell + (1.0 - g) * ell + 1.0 - g + 0.5 * g * g + pi2_12)
    } else if beta >= 2.0 {
        beta * beta * a / ((beta - 1.0) * (beta - 1.0))
    } else {
        let gm = gamma(1.0 - beta);
        let b = gm * (beta * digamma(1.0 - beta) + 1.0) / (beta * beta);
        let one_m = 1.0 - beta;
        let value =
            beta * beta * (a.powf(beta) * (gm / beta * ell + b) + a / (one_m * one_m));
        value.clamp(0.0, 1.0)
    }
}

/// `T(y) = int_0^1 t^{-d/alpha} e^{-y t} dt`, the inner kernel of `I_1^(B)`,
/// in closed form: `T(y) = gamma_lower(m, y) / y^m` with `m = 1 - d/alpha`.
fn i1b_inner_kernel(y: f64, m: f64) -> f64 {
    debug_assert!(m > 0.0 && m < 1.0 && y >= 0.0);
    if y < 1e-6 {
        // short series; next term is O(y^3)
        1.0 / m - y / (m + 1.0) + y * y / (2.0 * (m + 2.0))
    } else {
        gamma(m) * gamma_lr(m, y) / y.powf(m)
    }
}

/// The two halves of the exact identity `I_1 = -I_1^(A) + I_1^(B)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct I1Decomposition {
    pub i1_a: f64,
    pub i1_b: f64,
}

impl I1Decomposition {
    /// Reassemble `I_1` from the two halves.
    pub fn reconstructed(&self) -> f64 {
        self.i1_b - self.i1_a
    }
}

fn validated(p: &ModelParams) -> Result<(), QuadratureError> {
    require_unit_intensity(p)?;
    validate_params(p, Purpose::Generic)?;
    Ok(())
}

/// Evaluate `I_1^(A)` and `I_1^(B)` by quadrature.
pub fn i1_decomposition(
    n: f64,
    r_n: f64,
    p: &ModelParams,
    spec: &QuadratureSpec,
) -> Result<I1Decomposition, QuadratureError> {
    assert!(r_n > 1.0 && n > 0.0);
    validated(p)?;
    let pre = (2.0 * n).powi(p.d as i32) * omega_d(p.d) * r_n.powf(p.dim());
    let a = p.lambda / r_n.powf(p.alpha);
    let inner = inner_spec(spec);
    let i1_a = pre * chi_product_tail(a, p.beta, &inner)?;

    // I_1^(B) = pre * a * E[W W' T(a W W')]; with U = W W' distributed with
    // density beta^2 u^{-beta-1} log u this is a single radial integral.
    let m = 1.0 - p.dim() / p.alpha;
    let beta = p.beta;
    let scale = (1.0 / a).max(1.0);
    let q = integrate_to_inf(
        move |u| {
            beta * beta * u.powf(-beta) * u.ln() * i1b_inner_kernel(a * u, m)
        },
        1.0,
        scale,
        spec,
    )?;
    let i1_b = pre * a * q.value;
    Ok(I1Decomposition { i1_a, i1_b })
}

/// Exact mean exceedance count split as `(I_1, I_2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanExceedances {
    pub i1: f64,
    pub i2: f64,
}

impl MeanExceedances {
    pub fn mean(&self) -> f64 {
        self.i1 - self.i2
    }
}

/// `I_1 = (2n)^d d omega_d int_{r_n}^inf rho^{d-1} chi(lambda rho^{-alpha})
/// drho`, the window-size-weighted mean count of long edges reaching out of
/// a vertex, valid for any threshold `r_n > 0`.
pub fn i1_exact(
    n: f64,
    r_n: f64,
    p: &ModelParams,
    spec: &QuadratureSpec,
) -> Result<f64, QuadratureError> {
    assert!(r_n > 0.0 && n > 0.0);
    validated(p)?;
    let d = p.dim();
    let pre = (2.0 * n).powi(p.d as i32) * d * omega_d(p.d);
    let inner = inner_spec(spec);
    let lambda = p.lambda;
    let alpha = p.alpha;
    let beta = p.beta;
    let q = integrate_to_inf(
        move |rho: f64| {
            let chi = chi_product_tail(lambda * rho.powf(-alpha), beta, &inner)
                .expect("inner chi quadrature");
            // combine in log space: rho^{d-1} alone can overflow in high
            // dimension while the product stays representable
            if chi == 0.0 {
                0.0
            } else {
                ((d - 1.0) * rho.ln() + chi.ln()).exp()
            }
        },
        r_n,
        r_n,
        spec,
    )?;
    Ok(pre * q.value)
}

/// Exact mean exceedance count `(I_1, I_2)`; `I_2` is exactly 0 in the
/// supported far-only geometry `r_n >= 2 n sqrt(d)` and unsupported
/// otherwise.
pub fn mean_exceedances_exact(
    n: f64,
    r_n: f64,
    p: &ModelParams,
    spec: &QuadratureSpec,
) -> Result<MeanExceedances, QuadratureError> {
    let required = 2.0 * n * p.dim().sqrt();
    if r_n < required {
        return Err(QuadratureError::UnsupportedGeometry { r_n, required });
    }
    Ok(MeanExceedances {
        i1: i1_exact(n, r_n, p, spec)?,
        i2: 0.0,
    })
}

/// Mean exceedance count when the far region is truncated to the box
/// `[-M, M]^d`, for direct comparison with the brute-force oracle
/// (one-dimensional geometry only).
///
/// For `d = 1`, swapping the order of integration collapses the window
/// average to
/// `2 [ 2n int_{r}^{M-n} chi du + int_{M-n}^{M+n} (M + n - u) chi du ]`.
pub fn mean_exceedances_truncated(
    n: f64,
    r_n: f64,
    outer_m: f64,
    p: &ModelParams,
    spec: &QuadratureSpec,
) -> Result<f64, QuadratureError> {
    assert!(r_n > 0.0 && n > 0.0);
    validated(p)?;
    if p.d != 1 {
        return Err(QuadratureError::UnsupportedDimension { d: p.d });
    }
    let required = 2.0 * n;
    if r_n < required {
        return Err(QuadratureError::UnsupportedGeometry { r_n, required });
    }
    assert!(outer_m >= r_n + n, "cutoff must leave room for far points");
    let inner = inner_spec(spec);
    let lambda = p.lambda;
    let alpha = p.alpha;
    let beta = p.beta;
    let chi_at = move |u: f64| {
        chi_product_tail(lambda * u.powf(-alpha), beta, &inner).expect("inner chi quadrature")
    };
    let bulk = integrate(chi_at, r_n, outer_m - n, spec)?.value;
    let edge = integrate(
        move |u: f64| (outer_m + n - u) * chi_at(u),
        outer_m - n,
        outer_m + n,
        spec,
    )?
    .value;
    Ok(2.0 * (2.0 * n * bulk + edge))
}

/// Printed leading term of `I_1` at threshold `r_n`.
pub fn i1_predicted(n: f64, r_n: f64, p: &ModelParams) -> Result<f64, QuadratureError> {
    validated(p)?;
    let d = p.dim();
    let pre = (2.0 * n).powi(p.d as i32) * omega_d(p.d);
    let reg = regime(p);
    Ok(match reg.tag {
        RegimeTag::InfiniteMean => {
            pre * gamma(1.0 - p.beta)
                * p.lambda.powf(p.beta)
                * p.beta
                * (d / (p.alpha * p.beta - d))
                * r_n.powf(d - p.alpha * p.beta)
                * (p.alpha * r_n.ln())
        }
        RegimeTag::Borderline => {
            pre * 0.5
                * p.lambda
                * (d / (p.alpha - d))
                * r_n.powf(d - p.alpha)
                * (p.alpha * r_n.ln()).powi(2)
        }
        RegimeTag::FiniteMean => {
            pre * p.lambda
                * (p.beta * p.beta / ((p.beta - 1.0) * (p.beta - 1.0)))
                * (d / (p.alpha - d))
                * r_n.powf(d - p.alpha)
        }
    })
}

/// Printed leading term of `I_1^(A)`.
pub fn i1a_predicted(n: f64, r_n: f64, p: &ModelParams) -> Result<f64, QuadratureError> {
    validated(p)?;
    let d = p.dim();
    let pre = (2.0 * n).powi(p.d as i32) * omega_d(p.d);
    Ok(match regime(p).tag {
        RegimeTag::InfiniteMean => {
            pre * p.beta
                * p.lambda.powf(p.beta)
                * gamma(1.0 - p.beta)
                * r_n.powf(d - p.alpha * p.beta)
                * (p.alpha * r_n.ln())
        }
        RegimeTag::Borderline => {
            pre * 0.5 * p.beta * p.lambda * r_n.powf(d - p.alpha) * (p.alpha * r_n.ln()).powi(2)
        }
        RegimeTag::FiniteMean => {
            pre * p.lambda * (p.beta * p.beta / ((p.beta - 1.0) * (p.beta - 1.0)))
                * r_n.powf(d - p.alpha)
        }
    })
}

/// Printed leading term of `I_1^(B)`.
pub fn i1b_predicted(n: f64, r_n: f64, p: &ModelParams) -> Result<f64, QuadratureError> {
    validated(p)?;
    let d = p.dim();
    let pre = (2.0 * n).powi(p.d as i32) * omega_d(p.d);
    Ok(match regime(p).tag {
        RegimeTag::InfiniteMean => {
            pre * p.beta
                * p.beta
                * gamma(1.0 - p.beta)
                * p.lambda.powf(p.beta)
                * (p.alpha / (p.alpha * p.beta - d))
                * r_n.powf(d - p.alpha * p.beta)
                * (p.alpha * r_n.ln())
        }
        RegimeTag::Borderline => {
            pre * 0.5
                * p.lambda
                * (p.alpha / (p.alpha - d))
                * r_n.powf(d - p.alpha)
                * (p.alpha * r_n.ln()).powi(2)
        }
        RegimeTag::FiniteMean => {
            pre * p.beta * p.beta * p.lambda * (p.alpha / (p.alpha - d))
                / ((p.beta - 1.0) * (p.beta - 1.0))
                * r_n.powf(d - p.alpha)
        }
    })
}
