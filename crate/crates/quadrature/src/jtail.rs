//! Two-point edge functional `J(z) = E[1 - e^{-lambda W V / |z|^alpha}]` for
//! a pair of independent Pareto weights, its split into a single-weight part
//! and a remainder, and the printed regime-wise upper bound.

use crate::{inner_spec, QuadratureError};
use analytics::{psi_beta, upper_incomplete_gamma};
use model_core::{regime, require_unit_intensity, validate_params, ModelParams, Purpose, RegimeTag};
use quad_core::{integrate_to_inf, QuadratureSpec};

/// Value and printed bound for the two-weight tail functional at one
/// separation.
#[derive(Debug, Clone, Copy)]
pub struct JTail {
    /// `J(z)`, evaluated as the sum of its two closed-form-assisted parts.
    pub value: f64,
    /// Regime-wise envelope (unit constant): `|z|^{-alpha beta} log |z|^alpha`,
    /// `|z|^{-alpha} log^2 |z|^alpha`, or `|z|^{-alpha}`.
    pub bound: f64,
}

/// `h(c) = int_1^inf w^{-beta} e^{-c w} dw = c^{beta-1} Gamma(1-beta, c)`.
fn h_weight_laplace(c: f64, beta: f64) -> f64 {
    c.powf(beta - 1.0) * upper_incomplete_gamma(1.0 - beta, c)
}

/// Evaluates `J(z)` at separation `|z| = z_norm` by splitting the double
/// weight integral at `w = 1`:
///
/// * `J^(1) = psi_beta(a) / beta^2` with `a = lambda z^{-alpha}` collects the
///   part where one weight is integrated out in closed form;
/// * `J^(2) = (a / beta) int_1^inf v^{-beta} h(a v) dv` is the remainder,
///   with `h` the weight Laplace transform above.
///
/// Requires `a <= 1`, i.e. separations past the kernel saturation range.
pub fn j_tail_check(
    z_norm: f64,
    p: &ModelParams,
    spec: &QuadratureSpec,
) -> Result<JTail, QuadratureError> {
    require_unit_intensity(p)?;
    validate_params(p, Purpose::Generic)?;
    let a = p.lambda * z_norm.powf(-p.alpha);
    assert!(
        a <= 1.0,
        "j_tail_check requires lambda / z^alpha <= 1, got {a}"
    );
    let beta = p.beta;
    let j1 = psi_beta(a, beta)? / (beta * beta);
    let inner = inner_spec(spec);
    let j2 = (a / beta)
        * integrate_to_inf(
            move |v: f64| v.powf(-beta) * h_weight_laplace(a * v, beta),
            1.0,
            (1.0 / a).max(1.0),
            &inner,
        )?
        .value;
    let log_za = p.alpha * z_norm.ln();
    let bound = match regime(p).tag {
        RegimeTag::InfiniteMean => z_norm.powf(-p.alpha * beta) * log_za,
        RegimeTag::Borderline => z_norm.powf(-p.alpha) * log_za * log_za,
        RegimeTag::FiniteMean => z_norm.powf(-p.alpha),
    };
    Ok(JTail {
        value: j1 + j2,
        bound,
    })
}
