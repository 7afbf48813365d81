//! Exact finite-size integral functionals of the model — the mean exceedance
//! count and its decomposition, the far-neighbor mean `Phi`, the rooted and
//! hub-conditioned quantities `I_n`, `A_n`, `E[X_n]` — together with their
//! printed leading-order terms, packaged as ratio diagnostics.
//!
//! These are the non-asymptotic oracles the simulation engines are checked
//! against. Generic adaptive integration lives in [`quad_core`] and is
//! re-exported here.

mod exceedances;
mod jtail;
mod rooted;

pub use exceedances::{
    chi_product_tail, i1_decomposition, i1_exact, i1_predicted, i1a_predicted, i1b_predicted,
    mean_exceedances_exact, mean_exceedances_truncated, I1Decomposition, MeanExceedances,
};
pub use jtail::{j_tail_check, JTail};
pub use quad_core::{integrate, integrate_to_inf, QuadError, Quadrature, QuadratureSpec};
pub use rooted::{
    an_exact, an_predicted, exn_exact, exn_predicted, exn_swapped, phi_leading_term, phi_n,
    pot_conditional_surrogate, rooted_conditional_double, rooted_conditional_exact,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuadratureError {
    #[error("near-near geometry unsupported: r_n = {r_n} < 2 n sqrt(d) = {required}")]
    UnsupportedGeometry { r_n: f64, required: f64 },
    #[error("operation implemented for d = 1 only, got d = {d}")]
    UnsupportedDimension { d: u32 },
    #[error(transparent)]
    Core(#[from] quad_core::QuadError),
    #[error(transparent)]
    Model(#[from] model_core::ModelError),
}

impl From<analytics::AnalyticsError> for QuadratureError {
    fn from(e: analytics::AnalyticsError) -> Self {
        match e {
            analytics::AnalyticsError::Model(m) => QuadratureError::Model(m),
            analytics::AnalyticsError::Quadrature(q) => QuadratureError::Core(q),
            // psi/G arguments are nonnegative by construction here
            other => panic!("unexpected analytics failure: {other}"),
        }
    }
}

/// Default tolerances for the exact functionals.
pub fn default_spec() -> QuadratureSpec {
    QuadratureSpec {
        rel_tol: 1e-9,
        abs_tol: 1e-12,
        max_subdivisions: 4000,
    }
}

/// Tightened tolerances for integrals nested inside another quadrature, so
/// that inner evaluation noise stays far below the outer error target.
///
/// The absolute tolerance is essentially disabled: the outer integrand is
/// often the inner integral evaluated deep in a tail, where its magnitude
/// is far below any fixed absolute floor yet its relative accuracy still
/// controls the outer tail mass.
pub(crate) fn inner_spec(outer: &QuadratureSpec) -> QuadratureSpec {
    QuadratureSpec {
        rel_tol: (outer.rel_tol * 1e-2).max(1e-13),
        abs_tol: 1e-300,
        max_subdivisions: outer.max_subdivisions,
    }
}

/// A grid of exact values next to the printed leading-order prediction.
#[derive(Debug, Clone)]
pub struct AsymptoticDiagnostic {
    pub grid: Vec<f64>,
    pub exact: Vec<f64>,
    pub predicted: Vec<f64>,
}

impl AsymptoticDiagnostic {
    pub fn ratios(&self) -> Vec<f64> {
        self.exact
            .iter()
            .zip(&self.predicted)
            .map(|(e, p)| e / p)
            .collect()
    }

    /// Whether the ratio sequence ends closer to 1 than it starts — the
    /// loose convergence check appropriate for log-corrected asymptotics.
    pub fn converging_to_one(&self) -> bool {
        let r = self.ratios();
        match (r.first(), r.last()) {
            (Some(first), Some(last)) => {
                r.iter().all(|x| x.is_finite()) && (last - 1.0).abs() <= (first - 1.0).abs()
            }
            _ => false,
        }
    }
}
