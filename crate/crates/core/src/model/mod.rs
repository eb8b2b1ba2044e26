//! The monotone regression model and its blocked Gibbs sampler.

mod chain;
mod config;
mod data;
mod gibbs;
pub mod prior_density;
mod prior_draw;
mod state;

pub use chain::{run_chain, run_chain_with_rng, PosteriorDraws};
pub use config::{Direction, LambdaExponent, ModelConfig, PriorFamily, SamplerConfig, Sigma2Prior};
pub use data::SeriesData;
pub use gibbs::{
    conditional_moments_eta, conditionals, update_eta_block, update_global_block,
    update_local_block, update_sigma2_block, GibbsSampler,
};
pub use prior_draw::{sample_joint_prior, sample_observations};
pub use state::{init_state, theta_from_eta, ChainState, FloorCounts, INIT_EPS, SCALE_FLOOR};
