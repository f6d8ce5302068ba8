//! Exact and near-exact likelihoods for the benchmark models.
//!
//! * AR(2): stationary Gaussian likelihood, factored as the bivariate
//!   stationary law of `(y₁, y₂)` times unit-variance autoregressive
//!   conditionals — O(M), exact.
//! * noisy MA(2): Gaussian with pentadiagonal covariance, evaluated through a
//!   banded Cholesky factorization — O(M), exact.
//! * g-and-k: the density has no closed form; `f(x) = φ(z*) / Q'(z*)` where
//!   `z*` inverts the quantile function by bisection and `Q'` is a central
//!   finite difference.

use crate::linalg::Matrix;
use crate::models::{ar2, gandk, ma2, PriorSpec};
use crate::reference::LogDensity;
use crate::{ModelId, ParamVector, Series};

const LN_2PI: f64 = 1.8378770664093453;

/// Exact stationary AR(2) log-likelihood; −∞ outside the stationarity
/// triangle.
pub fn ar2_loglik(theta: &ParamVector, y: &[f64]) -> f64 {
    assert_eq!(theta.model_id, ModelId::Ar2);
    let (t1, t2) = (theta.values[0], theta.values[1]);
    if !ar2::in_triangle(t1, t2) || y.is_empty() {
        return f64::NEG_INFINITY;
    }
    let (g0, g1) = ar2::yule_walker_cov(t1, t2);
    if y.len() == 1 {
        return -0.5 * (LN_2PI + g0.ln() + y[0] * y[0] / g0);
    }
    // Bivariate stationary start: covariance [[γ₀, γ₁], [γ₁, γ₀]].
    let det = g0 * g0 - g1 * g1;
    let quad = (g0 * y[0] * y[0] - 2.0 * g1 * y[0] * y[1] + g0 * y[1] * y[1]) / det;
    let mut ll = -LN_2PI - 0.5 * det.ln() - 0.5 * quad;
    // Unit-variance innovations thereafter.
    for l in 2..y.len() {
        let resid = y[l] - t1 * y[l - 1] - t2 * y[l - 2];
        ll += -0.5 * (LN_2PI + resid * resid);
    }
    ll
}

/// Banded (bandwidth-2) Cholesky: returns rows of the lower factor as
/// `[L[i,i−2], L[i,i−1], L[i,i]]`, or `None` if the matrix is not positive
/// definite.
fn banded_cholesky(diag: f64, lag1: f64, lag2: f64, n: usize) -> Option<Matrix> {
    let mut l = Matrix::zeros(n, 3);
    for i in 0..n {
        for j in i.saturating_sub(2)..=i {
            let c = match i - j {
                0 => diag,
                1 => lag1,
                _ => lag2,
            };
            // s = C[i,j] − Σ_k L[i,k]·L[j,k] over the shared band.
            let mut s = c;
            let lo = i.saturating_sub(2).max(j.saturating_sub(2));
            for k in lo..j {
                s -= l.at(i, 2 - (i - k)) * l.at(j, 2 - (j - k));
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                *l.at_mut(i, 2) = s.sqrt();
            } else {
                *l.at_mut(i, 2 - (i - j)) = s / l.at(j, 2);
            }
        }
    }
    Some(l)
}

/// Exact noisy-MA(2) log-likelihood with observation noise `sigma_eps`;
/// −∞ outside the (closed) identifiability triangle.
pub fn ma2_loglik(theta: &ParamVector, y: &[f64], sigma_eps: f64) -> f64 {
    assert_eq!(theta.model_id, ModelId::Ma2);
    let (t1, t2) = (theta.values[0], theta.values[1]);
    if !ma2::in_triangle(t1, t2) || y.is_empty() {
        return f64::NEG_INFINITY;
    }
    let diag = 1.0 + t1 * t1 + t2 * t2 + sigma_eps * sigma_eps;
    let lag1 = t1 * (1.0 + t2);
    let lag2 = t2;
    let n = y.len();
    let Some(l) = banded_cholesky(diag, lag1, lag2, n) else {
        return f64::NEG_INFINITY;
    };
    // Forward-solve L z = y, accumulating log|L| and ‖z‖².
    let mut z = vec![0.0; n];
    let mut logdet_half = 0.0;
    let mut quad = 0.0;
    for i in 0..n {
        let mut s = y[i];
        for k in i.saturating_sub(2)..i {
            s -= l.at(i, 2 - (i - k)) * z[k];
        }
        z[i] = s / l.at(i, 2);
        logdet_half += l.at(i, 2).ln();
        quad += z[i] * z[i];
    }
    -0.5 * (n as f64) * LN_2PI - logdet_half - 0.5 * quad
}

/// How far the bisection brackets reach in z. Beyond |z| = 40 the normal
/// density underflows to zero anyway.
const Z_BRACKET: f64 = 40.0;
const FD_STEP: f64 = 1e-6;

/// Log density of one g-and-k observation via quantile-function inversion;
/// −∞ for unattainable x or invalid parameters.
pub fn gandk_logpdf(theta: &ParamVector, x: f64, c: f64) -> f64 {
    assert_eq!(theta.model_id, ModelId::Gandk);
    let [a, b, g, k] = [theta.values[0], theta.values[1], theta.values[2], theta.values[3]];
    if !(b > 0.0) || !(k >= 0.0) || !x.is_finite() {
        return f64::NEG_INFINITY;
    }
    let q = |z: f64| gandk::quantile_fn(a, b, g, k, c, z);
    let (mut lo, mut hi) = (-Z_BRACKET, Z_BRACKET);
    if x < q(lo) || x > q(hi) {
        return f64::NEG_INFINITY;
    }
    // Q is strictly increasing for B > 0, k ≥ 0, |c| < 1: plain bisection.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if q(mid) < x {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 * (1.0 + mid.abs()) {
            break;
        }
    }
    let z = 0.5 * (lo + hi);
    let dq = (q(z + FD_STEP) - q(z - FD_STEP)) / (2.0 * FD_STEP);
    if !(dq > 0.0) {
        return f64::NEG_INFINITY;
    }
    -0.5 * (LN_2PI + z * z) - dq.ln()
}

/// Log-likelihood of an i.i.d. g-and-k sample.
pub fn gandk_loglik(theta: &ParamVector, y: &[f64], c: f64) -> f64 {
    y.iter().map(|&x| gandk_logpdf(theta, x, c)).sum()
}

/// Log posterior (up to a constant) for AR(2) data under the uniform
/// triangle prior.
pub fn ar2_log_posterior(y: Series) -> LogDensity {
    let prior = PriorSpec::new(ModelId::Ar2);
    LogDensity::new(
        move |theta| ar2_loglik(theta, &y) + prior.log_density(theta),
        move |theta| prior.in_support(theta),
    )
}

/// Log posterior for noisy MA(2) data under the uniform triangle prior.
pub fn ma2_log_posterior(y: Series) -> LogDensity {
    let prior = PriorSpec::new(ModelId::Ma2);
    LogDensity::new(
        move |theta| ma2_loglik(theta, &y, ma2::DEFAULT_SIGMA_EPS) + prior.log_density(theta),
        move |theta| prior.in_support(theta),
    )
}

/// Log posterior for i.i.d. g-and-k data under the Gamma priors.
pub fn gandk_log_posterior(y: Series) -> LogDensity {
    let prior = PriorSpec::new(ModelId::Gandk);
    LogDensity::new(
        move |theta| gandk_loglik(theta, &y, gandk::DEFAULT_C) + prior.log_density(theta),
        move |theta| prior.in_support(theta),
    )
}
