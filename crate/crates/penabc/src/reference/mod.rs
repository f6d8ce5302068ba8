//! Reference posteriors and evaluation metrics.
//!
//! ABC output is judged against posteriors that do not rely on summary
//! statistics: exact Gaussian likelihoods for AR(2) and noisy MA(2), and a
//! finite-difference density for g-and-k (the α-stable likelihood is not
//! available, so that model is evaluated by parameter RMSE instead).
//! Posterior draws come from a deterministic grid oracle for the 2-D models
//! and from random-walk Metropolis for g-and-k; posterior-vs-posterior
//! discrepancy is the exact order-1 Wasserstein distance between equal-weight
//! samples.

pub mod grid;
pub mod likelihoods;
pub mod metrics;
pub mod metropolis;
pub mod wasserstein;

pub use grid::{grid_posterior, sample_grid, GridPosterior};
pub use likelihoods::{
    ar2_log_posterior, ar2_loglik, gandk_log_posterior, gandk_logpdf, gandk_loglik, ma2_log_posterior, ma2_loglik,
};
pub use metrics::{rmse, rmse_values};
pub use metropolis::{rw_metropolis, thin_chain, MetropolisResult};
pub use wasserstein::{assignment_wasserstein, wasserstein, wasserstein_points};

use crate::ParamVector;

/// A log posterior density known up to an additive constant, with an
/// explicit support predicate.
pub struct LogDensity {
    evaluator: Box<dyn Fn(&ParamVector) -> f64 + Send + Sync>,
    support: Box<dyn Fn(&ParamVector) -> bool + Send + Sync>,
}

impl LogDensity {
    pub fn new(
        evaluator: impl Fn(&ParamVector) -> f64 + Send + Sync + 'static,
        support: impl Fn(&ParamVector) -> bool + Send + Sync + 'static,
    ) -> Self {
        LogDensity { evaluator: Box::new(evaluator), support: Box::new(support) }
    }

    pub fn in_support(&self, theta: &ParamVector) -> bool {
        (self.support)(theta)
    }

    /// Log density at `theta`; −∞ off support.
    pub fn log_density(&self, theta: &ParamVector) -> f64 {
        if self.in_support(theta) {
            (self.evaluator)(theta)
        } else {
            f64::NEG_INFINITY
        }
    }
}

impl std::fmt::Debug for LogDensity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("LogDensity")
    }
}
