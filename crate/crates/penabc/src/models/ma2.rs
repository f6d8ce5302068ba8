//! The noisy MA(2) process: a latent moving average observed through
//! independent Gaussian noise,
//!
//! ```text
//! x_l = ξ_l + θ₁ ξ_{l−1} + θ₂ ξ_{l−2},   ξ_l ~ N(0,1)
//! y_l = x_l + ξ^y_l,                     ξ^y_l ~ N(0, σ_ε²),  σ_ε = 0.3
//! ```
//!
//! with θ uniform over the identifiability triangle θ₁ ∈ [−2,2],
//! θ₂ ∈ [−1,1], θ₂ ± θ₁ ≥ −1. The observed process is Gaussian with a
//! banded covariance (see [`theoretical_autocov`]), which is what the exact
//! likelihood in [`crate::reference`] evaluates.

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::{ModelId, ParamVector, Series};
use rand_distr::{Distribution, StandardNormal};

/// Observation-noise standard deviation used throughout the benchmark.
pub const DEFAULT_SIGMA_EPS: f64 = 0.3;

/// Is θ inside the (closed) identifiability triangle?
pub fn in_triangle(theta1: f64, theta2: f64) -> bool {
    (-2.0..=2.0).contains(&theta1)
        && (-1.0..=1.0).contains(&theta2)
        && theta2 + theta1 >= -1.0
        && theta2 - theta1 >= -1.0
}

/// Autocovariance of the observed process: lag 0 is
/// `1 + θ₁² + θ₂² + σ_ε²`, lag 1 is `θ₁(1 + θ₂)`, lag 2 is `θ₂`, zero beyond.
pub fn theoretical_autocov(theta1: f64, theta2: f64, sigma_eps: f64, lag: usize) -> f64 {
    match lag {
        0 => 1.0 + theta1 * theta1 + theta2 * theta2 + sigma_eps * sigma_eps,
        1 => theta1 * (1.0 + theta2),
        2 => theta2,
        _ => 0.0,
    }
}

pub(crate) fn validate(theta: &ParamVector) -> Result<(f64, f64)> {
    assert_eq!(theta.model_id, ModelId::Ma2);
    let [t1, t2] = theta.values[..] else {
        return Err(Error::DimMismatch("MA(2) needs 2 parameters".into()));
    };
    if !in_triangle(t1, t2) {
        return Err(Error::OutOfSupport {
            model: ModelId::Ma2,
            detail: format!("θ = ({t1}, {t2}) outside the identifiability triangle"),
        });
    }
    Ok((t1, t2))
}

/// Simulate `m` observations of the noisy MA(2).
pub fn simulate_ma2_noisy(theta: &ParamVector, m: usize, sigma_eps: f64, rng: &mut Rng) -> Result<Series> {
    let (t1, t2) = validate(theta)?;
    // ξ_{l−2}, ξ_{l−1} for the first observation come from the stationary
    // (i.i.d.) innovation stream: draw m + 2 innovations up front.
    let xi: Vec<f64> = (0..m + 2).map(|_| StandardNormal.sample(rng)).collect();
    Ok((0..m)
        .map(|l| {
            let x = xi[l + 2] + t1 * xi[l + 1] + t2 * xi[l];
            let eta: f64 = StandardNormal.sample(rng);
            x + sigma_eps * eta
        })
        .collect())
}
