//! Deterministic grid posterior for the 2-D models.
//!
//! The parameter triangle sits inside the box [−2,2] × [−1,1]; a
//! `resolution × resolution` lattice of cell centers covers the box, nodes
//! outside the prior support are dropped, and each remaining node gets mass
//! proportional to `exp(loglik + logprior)`. Sampling is inverse-CDF over
//! the node masses. Exponentials are max-shifted so the normalization never
//! overflows.

use crate::abc::PosteriorSample;
use crate::error::{Error, Result};
use crate::linalg::neumaier_sum;
use crate::models::PriorSpec;
use crate::reference::LogDensity;
use crate::rng::Rng;
use crate::{ModelId, ParamVector};
use rand::Rng as _;

/// A discrete approximation of a 2-D posterior: in-support nodes and their
/// normalized masses.
#[derive(Debug, Clone)]
pub struct GridPosterior {
    pub model_id: ModelId,
    pub points: Vec<(f64, f64)>,
    pub masses: Vec<f64>,
}

impl GridPosterior {
    /// Mass-weighted posterior mean.
    pub fn mean(&self) -> (f64, f64) {
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for ((t1, t2), w) in self.points.iter().zip(&self.masses) {
            m1 += t1 * w;
            m2 += t2 * w;
        }
        (m1, m2)
    }
}

/// Bounding box of both parameter triangles.
const BOX: ((f64, f64), (f64, f64)) = ((-2.0, 2.0), (-1.0, 1.0));

/// Evaluate `exp(loglik + logprior)` over the triangle-interior lattice and
/// normalize to a probability vector.
pub fn grid_posterior(loglik: &LogDensity, prior: &PriorSpec, resolution: usize) -> Result<GridPosterior> {
    assert!(
        matches!(prior.model_id, ModelId::Ar2 | ModelId::Ma2),
        "grid oracle covers the 2-D models only"
    );
    assert!(resolution >= 2);
    let ((lo1, hi1), (lo2, hi2)) = BOX;
    let step1 = (hi1 - lo1) / resolution as f64;
    let step2 = (hi2 - lo2) / resolution as f64;

    let mut points = Vec::new();
    let mut logmass = Vec::new();
    for i in 0..resolution {
        for j in 0..resolution {
            let t1 = lo1 + (i as f64 + 0.5) * step1;
            let t2 = lo2 + (j as f64 + 0.5) * step2;
            let theta = ParamVector::new(prior.model_id, vec![t1, t2]);
            if !prior.in_support(&theta) {
                continue;
            }
            let lp = loglik.log_density(&theta) + prior.log_density(&theta);
            if lp > f64::NEG_INFINITY {
                points.push((t1, t2));
                logmass.push(lp);
            }
        }
    }
    let max_lp = logmass.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if points.is_empty() || !max_lp.is_finite() {
        return Err(Error::Degenerate("posterior mass vanishes on every grid node".into()));
    }
    let mut masses: Vec<f64> = logmass.iter().map(|lp| (lp - max_lp).exp()).collect();
    let total = neumaier_sum(&masses);
    if total <= 0.0 {
        return Err(Error::Degenerate("posterior mass vanishes on every grid node".into()));
    }
    for w in &mut masses {
        *w /= total;
    }
    Ok(GridPosterior { model_id: prior.model_id, points, masses })
}

/// Inverse-CDF sampling of grid nodes.
pub fn sample_grid(gp: &GridPosterior, n: usize, rng: &mut Rng) -> PosteriorSample {
    assert!(!gp.points.is_empty());
    let mut cdf = Vec::with_capacity(gp.masses.len());
    let mut acc = 0.0;
    for w in &gp.masses {
        acc += w;
        cdf.push(acc);
    }
    let draws = (0..n)
        .map(|_| {
            let u: f64 = rng.gen_range(0.0..1.0);
            let idx = cdf.partition_point(|&c| c < u).min(gp.points.len() - 1);
            let (t1, t2) = gp.points[idx];
            ParamVector::new(gp.model_id, vec![t1, t2])
        })
        .collect();
    PosteriorSample::reference(draws)
}
