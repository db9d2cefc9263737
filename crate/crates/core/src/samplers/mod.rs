//! Random graph models on a prescribed degree sequence.

mod configuration;
mod grg;
mod switch;

pub use configuration::{configuration_model, erase, erased_configuration_model, Multigraph};
pub use grg::{expected_degrees, generalized_random_graph, pair_probability};
pub use switch::{
    burn_in_for_edges, default_burn_in, havel_hakimi_realization, uniform_sample_mcmc,
    uniform_sample_mcmc_traced, SwitchChain, SwitchStats, Trace, DEFAULT_KAPPA,
};
