//! Explicit constants and the scaling sequences: the unit-ball volume, the
//! `c_n` normalization of the maximum edge length, the hub level `d_n`, the
//! excess threshold `t_n(t)`, and the regime constant families.

use crate::AnalyticsError;
use model_core::{
    require_unit_intensity, validate_params, ModelParams, Purpose, Regime, RegimeTag,
};
use serde::Serialize;
use statrs::function::gamma::gamma;

/// Volume of the `d`-dimensional Euclidean unit ball,
/// `pi^{d/2} / Gamma(d/2 + 1)`.
pub fn omega_d(d: u32) -> f64 {
    let half = f64::from(d) / 2.0;
    std::f64::consts::PI.powf(half) / gamma(half + 1.0)
}

/// Validate for the limit-theorem windows and require unit intensity; all
/// closed-form constants assume both.
fn theorem_regime(p: &ModelParams) -> Result<Regime, AnalyticsError> {
    require_unit_intensity(p)?;
    Ok(validate_params(p, Purpose::MaxLimitLaw)?)
}

/// The constant multiplying `n^{d/theta}` (times the regime's log power) in
/// the `c_n` normalization.
pub fn cn_constant(p: &ModelParams) -> Result<f64, AnalyticsError> {
    let reg = theorem_regime(p)?;
    let d = p.dim();
    let th = reg.theta;
    let pre = 2f64.powi(p.d as i32) * omega_d(p.d);
    let base = match reg.tag {
        RegimeTag::InfiniteMean => {
            pre * gamma(1.0 - p.beta)
                * p.lambda.powf(p.beta)
                * p.beta
                * (d / (p.alpha * p.beta - d))
                * (p.alpha * d / th)
        }
        RegimeTag::Borderline => {
            pre * (p.lambda / 2.0)
                * (d / (p.alpha - d))
                * (p.alpha * p.alpha * d * d / (th * th))
        }
        RegimeTag::FiniteMean => {
            pre * p.lambda
                * (p.beta * p.beta / ((p.beta - 1.0) * (p.beta - 1.0)))
                * (d / (p.alpha - d))
        }
    };
    Ok(base.powf(1.0 / th))
}

/// The normalization `c_n` of the maximum edge length:
/// `const * n^{d/theta}` times `(log n)^{1/theta}` for `beta < 1`,
/// `(log n)^{2/theta}` for `beta = 1`, and no log factor for `beta > 1`.
pub fn scaling_cn(n: f64, p: &ModelParams) -> Result<f64, AnalyticsError> {
    assert!(n >= 2.0, "c_n defined for n >= 2");
    let reg = theorem_regime(p)?;
    let c0 = cn_constant(p)?;
    let log_pow = match reg.tag {
        RegimeTag::InfiniteMean => n.ln().powf(1.0 / reg.theta),
        RegimeTag::Borderline => n.ln().powf(2.0 / reg.theta),
        RegimeTag::FiniteMean => 1.0,
    };
    Ok(c0 * n.powf(p.dim() / reg.theta) * log_pow)
}

/// The constant `kappa_beta` entering the plain (log-free) hub scale.
pub fn kappa_beta(p: &ModelParams) -> Result<f64, AnalyticsError> {
    let reg = theorem_regime(p)?;
    let d = p.dim();
    let dom = d * omega_d(p.d);
    Ok(match reg.tag {
        RegimeTag::InfiniteMean => {
            let g = gamma(1.0 - p.beta);
            (g * g * p.lambda.powf(p.beta) * dom / (p.alpha * p.beta - d)).powf(1.0 / p.beta)
        }
        RegimeTag::Borderline => p.lambda * (dom / (p.alpha - d)) * (d / (p.alpha - d)),
        RegimeTag::FiniteMean => {
            let r = p.beta / (p.beta - 1.0);
            p.lambda * (dom / (p.alpha - d)) * r * r
        }
    })
}

/// The constant `K` governing the mean number of hub exceedances.
pub fn k_constant(p: &ModelParams) -> Result<f64, AnalyticsError> {
    let reg = theorem_regime(p)?;
    let d = p.dim();
    let dom = d * omega_d(p.d);
    Ok(match reg.tag {
        RegimeTag::InfiniteMean => {
            dom * p.beta * gamma(1.0 - p.beta) * p.lambda.powf(p.beta) / (p.alpha * p.beta - d)
        }
        RegimeTag::Borderline => dom * p.lambda / (2.0 * (p.alpha - d)),
        RegimeTag::FiniteMean => {
            let r = p.beta / (p.beta - 1.0);
            (dom / (p.alpha - d)) * p.lambda * r * r
        }
    })
}

/// The low-weight integral constants, one per regime where the printed
/// formula is defined (`less` needs `beta < 1` for a positive `Gamma(1-beta)`,
/// `greater` needs `beta > 1`; `equal` only needs `alpha > d`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KappaLow {
    pub less: Option<f64>,
    pub equal: Option<f64>,
    pub greater: Option<f64>,
}

impl KappaLow {
    /// The constant matching the active regime.
    pub fn active(&self, tag: RegimeTag) -> Option<f64> {
        match tag {
            RegimeTag::InfiniteMean => self.less,
            RegimeTag::Borderline => self.equal,
            RegimeTag::FiniteMean => self.greater,
        }
    }
}

/// Evaluate the `kappa_<`, `kappa_=`, `kappa_>` triple.
pub fn kappa_low(p: &ModelParams) -> Result<KappaLow, AnalyticsError> {
    theorem_regime(p)?;
    let d = p.dim();
    let dom = d * omega_d(p.d);
    let less = (p.beta < 1.0).then(|| {
        p.beta * gamma(1.0 - p.beta) * p.lambda.powf(p.beta) * dom / (p.alpha * p.beta - d)
    });
    let equal = Some(p.lambda * dom / (p.alpha - d));
    let greater =
        (p.beta > 1.0).then(|| p.lambda * (dom / (p.alpha - d)) * p.beta * p.beta / (p.beta - 1.0));
    Ok(KappaLow {
        less,
        equal,
        greater,
    })
}

/// Hub level `d_n` as a function of `c_n` (theorem form, `K`-based):
/// `beta^{1/beta} c_n^{1/beta} (K log(K c_n^{d/theta}))^{-1/beta}` for
/// `beta < 1`, `c_n / (K log^2(K c_n^{d/theta}))` for `beta = 1`, and
/// `c_n / K` for `beta > 1`.
pub fn hub_level_dn(c_n: f64, p: &ModelParams) -> Result<f64, AnalyticsError> {
    assert!(c_n > 1.0, "hub level defined for c_n > 1");
    let reg = theorem_regime(p)?;
    let k = k_constant(p)?;
    let log_arg = k * c_n.powf(p.dim() / reg.theta);
    match reg.tag {
        RegimeTag::InfiniteMean => {
            if log_arg <= 1.0 {
                return Err(AnalyticsError::NonPositiveLogArgument(log_arg));
            }
            Ok(p.beta.powf(1.0 / p.beta)
                * c_n.powf(1.0 / p.beta)
                * (k * log_arg.ln()).powf(-1.0 / p.beta))
        }
        RegimeTag::Borderline => {
            if log_arg <= 1.0 {
                return Err(AnalyticsError::NonPositiveLogArgument(log_arg));
            }
            Ok(c_n / (k * log_arg.ln().powi(2)))
        }
        RegimeTag::FiniteMean => Ok(c_n / k),
    }
}

/// Hub level in the plain `kappa_beta` form:
/// `kappa^{-1} c_n^{1/beta}` for `beta < 1`, `kappa^{-1} c_n / log c_n` for
/// `beta = 1`, `kappa^{-1} c_n` for `beta > 1`.
pub fn kappa_hub_level_dn(c_n: f64, p: &ModelParams) -> Result<f64, AnalyticsError> {
    assert!(c_n > 1.0, "hub level defined for c_n > 1");
    let reg = theorem_regime(p)?;
    let kappa = kappa_beta(p)?;
    Ok(match reg.tag {
        RegimeTag::InfiniteMean => c_n.powf(1.0 / p.beta) / kappa,
        RegimeTag::Borderline => c_n / (kappa * c_n.ln()),
        RegimeTag::FiniteMean => c_n / kappa,
    })
}

/// Excess threshold `t_n(t) = c_n^{1/theta} (1 + t/theta)`.
pub fn pot_threshold_tn(c_n: f64, t: f64, theta: f64) -> f64 {
    assert!(c_n > 1.0 && t >= 0.0 && theta > 0.0);
    c_n.powf(1.0 / theta) * (1.0 + t / theta)
}

/// Ratio `t_n / max(n, n^{d/theta} (log n)^{2/theta})`; the conditional
/// excess law requires this to diverge along the sequence.
pub fn growth_condition_ratio(n: f64, t_n: f64, p: &ModelParams) -> Result<f64, AnalyticsError> {
    assert!(n >= 2.0 && t_n > 0.0);
    let reg = theorem_regime(p)?;
    let floor = n.max(n.powf(p.dim() / reg.theta) * n.ln().powf(2.0 / reg.theta));
    Ok(t_n / floor)
}

/// All regime constants for one parameter set, in stable field order for
/// serialization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeConstants {
    pub theta: f64,
    pub gamma: f64,
    pub omega_d: f64,
    pub c_cn: f64,
    pub kappa_beta: f64,
    pub k_big: f64,
    pub kappa_low: KappaLow,
}

pub fn regime_constants(p: &ModelParams) -> Result<RegimeConstants, AnalyticsError> {
    let reg = theorem_regime(p)?;
    Ok(RegimeConstants {
        theta: reg.theta,
        gamma: reg.gamma,
        omega_d: omega_d(p.d),
        c_cn: cn_constant(p)?,
        kappa_beta: kappa_beta(p)?,
        k_big: k_constant(p)?,
        kappa_low: kappa_low(p)?,
    })
}
