//! Exact sampling of the marked process conditioned on the hub event
//! `{W_n* > d_n}` (some window vertex carries weight above the hub level),
//! plus the experiments built on it: the hub exceedance count `X_n`, the
//! conditional peaks-over-threshold indicators, and the rooted variant.
//!
//! Conditioning is by planting, not rejection: the weight split at `d_n`
//! makes hubs and non-hubs independent Poisson processes, so conditioning
//! on at least one hub only zero-truncates the hub count. The sampler is
//! exact at any rarity level.

mod config;
mod experiments;

pub use config::{
    hub_event_probability, hub_mean_intensity, hub_multiplicity_stats, sample_conditioned_on_hub,
    HubConfiguration, HubMultiplicity,
};
pub use experiments::{
    rooted_pot_simulate, rooted_pot_simulate_with_phi, simulate_pot_conditional,
    simulate_pot_conditional_at_level, simulate_x_n, x_n_given_hubs, PotReplicate, XnSample,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HubError {
    #[error("hub level {d_n} must exceed 1")]
    InvalidHubLevel { d_n: f64 },
    #[error("threshold grid must be non-empty")]
    EmptyGrid,
    #[error(transparent)]
    Engine(#[from] long_edge_engine::EngineError),
    #[error(transparent)]
    Model(#[from] model_core::ModelError),
    #[error(transparent)]
    Quadrature(#[from] quadrature::QuadratureError),
    #[error(transparent)]
    Analytics(#[from] analytics::AnalyticsError),
    #[error(transparent)]
    Sampling(#[from] sampling::SamplingError),
}
