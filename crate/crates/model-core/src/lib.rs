//! Ground-truth definitions for the scale-free random connection model.
//!
//! Vertices form a homogeneous Poisson point process of intensity `rho` on
//! `R^d`; every vertex `x` carries an i.i.d. Pareto weight with tail
//! `P(W_x > w) = w^{-beta}` for `w >= 1`. Conditionally on vertices and
//! weights, each pair `{x, y}` is connected independently with probability
//!
//! ```text
//! p_xy = 1 - exp(-lambda * W_x * W_y / |x - y|^alpha)        (standard)
//! p_xy = exp(-|x - y| / (lambda * W_x * W_y))                (exponential)
//! ```
//!
//! Every vertex has almost surely finite degree iff `min(alpha, alpha*beta) > d`.
//! The extreme-value index governing the longest edges is
//!
//! ```text
//! theta = alpha*beta - d   (beta < 1)         theta = alpha - d   (beta >= 1)
//! ```
//!
//! This crate owns parameter validation, the regime classification and the
//! two kernels; everything downstream (samplers, quadrature oracles, the
//! statistics harness) consumes these definitions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Connection kernel variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// `1 - exp(-lambda w1 w2 / dist^alpha)`; polynomially decaying tail.
    #[default]
    Standard,
    /// `exp(-dist / (lambda w1 w2))`; exponentially decaying in distance.
    ExponentialModified,
}

/// The parameter tuple `(d, alpha, beta, lambda)` plus point-process
/// intensity `rho` and kernel choice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Spatial dimension (positive integer).
    pub d: u32,
    /// Distance decay exponent, `alpha > 0`.
    pub alpha: f64,
    /// Weight tail index, `beta > 0`.
    pub beta: f64,
    /// Edge intensity, `lambda > 0`.
    pub lambda: f64,
    /// Point-process intensity; analytic constants require `rho = 1`.
    #[serde(default = "default_rho")]
    pub rho: f64,
    /// Connection kernel.
    #[serde(default)]
    pub kernel: KernelKind,
}

fn default_rho() -> f64 {
    1.0
}

impl ModelParams {
    /// Convenience constructor with `rho = 1` and the standard kernel.
    pub fn new(d: u32, alpha: f64, beta: f64, lambda: f64) -> Self {
        Self {
            d,
            alpha,
            beta,
            lambda,
            rho: 1.0,
            kernel: KernelKind::Standard,
        }
    }

    /// Dimension as a float, used pervasively in exponent arithmetic.
    pub fn dim(&self) -> f64 {
        f64::from(self.d)
    }
}

/// Weight-mean regime, decided by `beta` alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeTag {
    /// `beta < 1`: weights have infinite mean.
    InfiniteMean,
    /// `beta = 1`: borderline, logarithmic corrections everywhere.
    Borderline,
    /// `beta > 1`: weights have finite mean.
    FiniteMean,
}

/// Regime classification together with the derived exponents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub tag: RegimeTag,
    /// Extreme-value index: `alpha*beta - d` for `beta < 1`, else `alpha - d`.
    pub theta: f64,
    /// `gamma = min(1, beta)`.
    pub gamma: f64,
}

/// Validation purpose: plain finite-degree check, or additionally the
/// window constraints of the two limit theorems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Purpose {
    #[default]
    Generic,
    /// Window for the unconditional maximum-edge law:
    /// `alpha*beta in (d, 2d]` if `beta < 1`, `alpha in (d, 2d]` if
    /// `beta = 1`, `alpha in (d, 2d)` if `beta > 1`.
    MaxLimitLaw,
    /// Window for the conditional peaks-over-threshold law (same as
    /// [`Purpose::MaxLimitLaw`]).
    ConditionalPot,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("parameter {name} must be positive, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },
    #[error("finite-degree condition min(alpha, alpha*beta) > d fails: min({alpha}, {alphabeta}) <= {d}")]
    FiniteDegreeViolation {
        alpha: f64,
        alphabeta: f64,
        d: f64,
    },
    #[error("parameters outside the regime window: {detail}")]
    RegimeWindowViolation { detail: String },
    #[error("connection probability queried at zero distance (the point process is a.s. simple)")]
    ZeroDistance,
    #[error("analytic constants require unit intensity rho = 1, got {rho}")]
    NonUnitIntensity { rho: f64 },
}

/// Classify the regime of an already-validated parameter set.
pub fn regime(p: &ModelParams) -> Regime {
    let d = p.dim();
    let (tag, theta) = if p.beta < 1.0 {
        (RegimeTag::InfiniteMean, p.alpha * p.beta - d)
    } else if p.beta == 1.0 {
        (RegimeTag::Borderline, p.alpha - d)
    } else {
        (RegimeTag::FiniteMean, p.alpha - d)
    };
    Regime {
        tag,
        theta,
        gamma: p.beta.min(1.0),
    }
}

/// Extreme-value index `theta`; assumes validated parameters.
pub fn theta(p: &ModelParams) -> f64 {
    regime(p).theta
}

/// Validate a parameter set and classify its regime.
///
/// `Generic` enforces positivity and the finite-degree condition
/// `min(alpha, alpha*beta) > d`. The theorem purposes additionally enforce
/// the window in which the respective limit law is proved; in particular
/// `alpha = 2d` with `beta > 1` is excluded (critical case, different law).
pub fn validate_params(p: &ModelParams, purpose: Purpose) -> Result<Regime, ModelError> {
    for (name, value) in [
        ("alpha", p.alpha),
        ("beta", p.beta),
        ("lambda", p.lambda),
        ("rho", p.rho),
    ] {
        if !(value > 0.0) || !value.is_finite() {
            return Err(ModelError::NonPositiveParameter { name, value });
        }
    }
    if p.d == 0 {
        return Err(ModelError::NonPositiveParameter {
            name: "d",
            value: 0.0,
        });
    }
    let d = p.dim();
    let alphabeta = p.alpha * p.beta;
    if p.alpha.min(alphabeta) <= d {
        return Err(ModelError::FiniteDegreeViolation {
            alpha: p.alpha,
            alphabeta,
            d,
        });
    }
    if matches!(purpose, Purpose::MaxLimitLaw | Purpose::ConditionalPot) {
        let two_d = 2.0 * d;
        let ok = if p.beta < 1.0 {
            alphabeta > d && alphabeta <= two_d
        } else if p.beta == 1.0 {
            p.alpha > d && p.alpha <= two_d
        } else {
            p.alpha > d && p.alpha < two_d
        };
        if !ok {
            return Err(ModelError::RegimeWindowViolation {
                detail: format!(
                    "d={}, alpha={}, beta={}: need alpha*beta in (d,2d] for beta<1, \
                     alpha in (d,2d] for beta=1, alpha in (d,2d) for beta>1",
                    p.d, p.alpha, p.beta
                ),
            });
        }
    }
    Ok(regime(p))
}

/// Require unit intensity before evaluating closed-form constants.
pub fn require_unit_intensity(p: &ModelParams) -> Result<(), ModelError> {
    if p.rho == 1.0 {
        Ok(())
    } else {
        Err(ModelError::NonUnitIntensity { rho: p.rho })
    }
}

/// Connection probability for two vertices at distance `dist` with weights
/// `w1, w2 >= 1`.
///
/// Uses `-expm1` for the standard kernel so that probabilities of order
/// `1e-300..1e-10` — the common case near the extremal thresholds — retain
/// full relative precision.
pub fn connection_prob(
    dist: f64,
    w1: f64,
    w2: f64,
    p: &ModelParams,
) -> Result<f64, ModelError> {
    if dist <= 0.0 {
        return Err(ModelError::ZeroDistance);
    }
    debug_assert!(w1 >= 1.0 && w2 >= 1.0, "weights live on [1, inf)");
    Ok(match p.kernel {
        KernelKind::Standard => {
            let exponent = p.lambda * w1 * w2 / dist.powf(p.alpha);
            -(-exponent).exp_m1()
        }
        KernelKind::ExponentialModified => (-dist / (p.lambda * w1 * w2)).exp(),
    })
}

/// Standard-kernel connection probability from the precomputed exponent
/// `lambda * w1 * w2 / dist^alpha`; hot-loop variant.
#[inline]
pub fn prob_from_exponent(exponent: f64) -> f64 {
    -(-exponent).exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn base(d: u32, alpha: f64, beta: f64, lambda: f64) -> ModelParams {
        ModelParams::new(d, alpha, beta, lambda)
    }

    #[test]
    fn finite_mean_window_ok() {
        let r = validate_params(&base(1, 1.5, 2.0, 1.0), Purpose::MaxLimitLaw).unwrap();
        assert_eq!(r.tag, RegimeTag::FiniteMean);
        assert_relative_eq!(r.theta, 0.5);
        assert_relative_eq!(r.gamma, 1.0);
    }

    #[test]
    fn infinite_mean_window_ok() {
        let r = validate_params(&base(1, 1.8, 0.9, 1.0), Purpose::MaxLimitLaw).unwrap();
        assert_eq!(r.tag, RegimeTag::InfiniteMean);
        assert_relative_eq!(r.theta, 1.8 * 0.9 - 1.0, epsilon = 1e-12);
    }

    #[test]
    fn critical_alpha_2d_excluded_for_finite_mean() {
        let err = validate_params(&base(1, 2.0, 2.0, 1.0), Purpose::MaxLimitLaw).unwrap_err();
        assert!(matches!(err, ModelError::RegimeWindowViolation { .. }));
        // ... but allowed at the boundary for beta <= 1.
        validate_params(&base(1, 2.0, 1.0, 1.0), Purpose::MaxLimitLaw).unwrap();
    }

    #[test]
    fn finite_degree_violation() {
        let err = validate_params(&base(1, 1.5, 0.5, 1.0), Purpose::Generic).unwrap_err();
        assert!(matches!(err, ModelError::FiniteDegreeViolation { .. }));
    }

    #[test]
    fn theta_examples() {
        assert_relative_eq!(theta(&base(1, 1.5, 1.0, 1.0)), 0.5);
        assert_relative_eq!(theta(&base(2, 3.0, 0.8, 1.0)), 0.4, epsilon = 1e-12);
        assert_relative_eq!(theta(&base(1, 1.5, 2.0, 1.0)), 0.5);
    }

    #[test]
    fn connection_prob_values() {
        let p = base(1, 1.5, 2.0, 1.0);
        // unit case: 1 - e^{-1}
        assert_relative_eq!(
            connection_prob(1.0, 1.0, 1.0, &p).unwrap(),
            1.0 - (-1.0f64).exp(),
            epsilon = 1e-15
        );
        // vanishes at infinity
        assert!(connection_prob(1e12, 1.0, 1.0, &p).unwrap() < 1e-15);
        // tiny exponents keep relative precision
        let tiny = connection_prob(1e8, 1.0, 1.0, &p).unwrap();
        assert_relative_eq!(tiny, 1e-12, max_relative = 1e-9);
        assert!(connection_prob(0.0, 1.0, 1.0, &p).is_err());
    }

    #[test]
    fn exponential_kernel_limits() {
        let mut p = base(1, 1.5, 2.0, 1.0);
        p.kernel = KernelKind::ExponentialModified;
        assert_relative_eq!(
            connection_prob(1e-12, 1.0, 1.0, &p).unwrap(),
            1.0,
            epsilon = 1e-9
        );
        assert!(connection_prob(1e6, 1.0, 1.0, &p).unwrap() < 1e-15);
    }

    #[test]
    fn params_serde_round_trip() {
        let p = base(1, 1.5, 2.0, 1.0);
        let json = serde_json::to_string(&p).unwrap();
        let back: ModelParams = serde_json::from_str(&json).unwrap();
        assert_eq!(p, back);
        // defaults apply when fields are omitted
        let q: ModelParams =
            serde_json::from_str(r#"{"d":1,"alpha":1.5,"beta":2.0,"lambda":1.0}"#).unwrap();
        assert_eq!(q.rho, 1.0);
        assert_eq!(q.kernel, KernelKind::Standard);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn valid_params() -> impl Strategy<Value = ModelParams> {
            (1u32..=3, 0.1f64..4.0, 0.1f64..4.0, 0.01f64..10.0)
                .prop_map(|(d, alpha, beta, lambda)| ModelParams::new(d, alpha, beta, lambda))
                .prop_filter("finite degree", |p| {
                    p.alpha.min(p.alpha * p.beta) > p.dim()
                })
        }

        proptest! {
            #[test]
            fn theta_positive_and_window_bounded(p in valid_params()) {
                let r = regime(&p);
                prop_assert!(r.theta > 0.0);
                if validate_params(&p, Purpose::MaxLimitLaw).is_ok() {
                    // inside the theorem window theta <= d
                    prop_assert!(r.theta <= p.dim() + 1e-12);
                }
            }

            #[test]
            fn kernel_monotone_and_bounded(
                p in valid_params(),
                dist in 1e-3f64..1e6,
                factor in 1.001f64..100.0,
                w1 in 1.0f64..1e4,
                w2 in 1.0f64..1e4,
            ) {
                let near = connection_prob(dist, w1, w2, &p).unwrap();
                let far = connection_prob(dist * factor, w1, w2, &p).unwrap();
                prop_assert!((0.0..=1.0).contains(&near));
                prop_assert!(far <= near + 1e-15);
                // standard kernel: nondecreasing in each weight
                if p.kernel == KernelKind::Standard {
                    let heavier = connection_prob(dist, w1 * factor, w2, &p).unwrap();
                    prop_assert!(heavier + 1e-15 >= near);
                }
            }
        }
    }
}
