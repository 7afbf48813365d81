//! Exact sampling of all exceedance edges touching the observation window —
//! the count `F(n, r)`, the edge lengths, and the maximum `e_n*` — without
//! materializing the infinite far point process.
//!
//! The far half of each exceedance edge is produced by dominated thinning: a
//! radial envelope built from the crude bound `T(y) <= S / (|y| - n sqrt
//! d)^alpha` on the aggregated near attraction dominates the true far-point
//! intensity, candidates are drawn from the envelope in closed form, and an
//! acceptance step restores the exact law. A brute-force oracle samples the
//! full process in a large box for validation.

mod envelope;
mod record;
mod sampler;

pub use envelope::{build_envelope, psi_bar, RadialEnvelope};
pub use record::{
    brute_force_exceedances, exceedance_record_from_parts, simulate_exceedances,
    simulate_exceedances_truncated, EStar, ExceedanceRecord,
};
pub use sampler::{
    conditional_nonempty_bernoulli, sample_far_edges, sample_far_edges_truncated, FarEdge,
    FarEdgeSet,
};

use quad_core::QuadratureSpec;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("envelope mass is not finite (S = {s}, threshold = {threshold})")]
    EnvelopeMassNonFinite { s: f64, threshold: f64 },
    #[error("acceptance probability {prob} exceeds 1: envelope no longer dominates")]
    EnvelopeViolation { prob: f64 },
    #[error("conditioning on >= 1 success requires a positive success probability")]
    AllZeroProbs,
    #[error("expected point count {expected:.1} exceeds the brute-force budget {budget}")]
    TooLarge { expected: f64, budget: u64 },
    #[error("engine requires the standard kernel")]
    UnsupportedKernel,
    #[error("threshold {threshold} must exceed the window circumradius {circumradius}")]
    ThresholdInsideWindow { threshold: f64, circumradius: f64 },
    #[error(transparent)]
    Model(#[from] model_core::ModelError),
    #[error(transparent)]
    Quadrature(#[from] quad_core::QuadError),
    #[error(transparent)]
    Sampling(#[from] sampling::SamplingError),
}

/// Quadrature tolerances for envelope construction; purely relative so the
/// envelope stays accurate when its total mass is tiny.
pub(crate) fn engine_spec() -> QuadratureSpec {
    QuadratureSpec {
        rel_tol: 1e-9,
        abs_tol: 1e-300,
        max_subdivisions: 2000,
    }
}
