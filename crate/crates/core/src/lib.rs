//! Triangle counts and degree-resolved clustering for random graphs with a
//! prescribed power-law degree sequence.
//!
//! The crate samples graphs with a prescribed degree sequence under four
//! models (uniform via an edge-switch chain, configuration model, erased
//! configuration model, generalized random graph), counts triangles and the
//! degree-resolved clustering curve `c(k)`, evaluates the limiting constants
//! numerically, and checks finite-size behaviour against an exhaustive
//! small-instance oracle.

pub mod cli;
pub mod degree_sequences;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod oracle;
pub mod par;
pub mod rng;
pub mod samplers;
pub mod theory;

pub use degree_sequences::{DegreeSequence, TailReport};
pub use error::{Error, Result};
pub use graph::{ClusteringCurve, Graph};
pub use par::Exec;
pub use samplers::{Multigraph, SwitchStats};
pub use theory::ModelParams;

/// Margin kept from both ends of the admissible exponent interval (2, 3).
pub const TAU_MARGIN: f64 = 1e-6;

/// Validates a degree exponent.
pub fn check_tau(tau: f64) -> Result<f64> {
    if tau.is_finite() && tau > 2.0 + TAU_MARGIN && tau < 3.0 - TAU_MARGIN {
        Ok(tau)
    } else {
        Err(Error::TauRange(tau))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_bounds() {
        assert!(check_tau(2.5).is_ok());
        assert!(check_tau(2.0).is_err());
        assert!(check_tau(3.0).is_err());
        assert!(check_tau(2.0 + 1e-7).is_err());
        assert!(check_tau(f64::NAN).is_err());
        assert_eq!(check_tau(3.5).unwrap_err().code(), "tau-range");
    }
}
