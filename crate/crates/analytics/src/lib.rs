//! Closed-form special functions, the model's explicit constants, the
//! scaling sequences `c_n` / `d_n` / `t_n`, and the limit laws (Fréchet,
//! Poisson, generalized Pareto and the rooted excess law `G_beta`).
//!
//! Everything here is a pure function of validated [`model_core::ModelParams`];
//! numerical integration is delegated to [`quad_core`] and used only as an
//! independent cross-check path for the closed forms.

mod laws;
mod scaling;
mod special;

pub use laws::{
    a_beta, frechet_cdf, g_beta_quadrature, g_beta_tail, gpd_tail, iota_n, poisson_pmf,
    prob_max_weight_le, tv_bound_shape,
};
pub use scaling::{
    cn_constant, growth_condition_ratio, hub_level_dn, k_constant, kappa_beta, kappa_low,
    kappa_hub_level_dn, omega_d, pot_threshold_tn, regime_constants, scaling_cn, KappaLow,
    RegimeConstants,
};
pub use special::{
    exp_integral_e1, psi_beta, psi_beta_quadrature, psi_quadrature_spec, upper_incomplete_gamma,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalyticsError {
    #[error("argument must be nonnegative, got {0}")]
    NegativeArgument(f64),
    #[error("logarithm argument must exceed 1, got {0}")]
    NonPositiveLogArgument(f64),
    #[error(transparent)]
    Model(#[from] model_core::ModelError),
    #[error(transparent)]
    Quadrature(#[from] quad_core::QuadError),
}
