//! The g-and-k distribution, defined through its quantile function
//!
//! ```text
//! Q(z) = A + B · (1 + c·tanh(g·z/2)) · z · (1 + z²)^k,   z = Φ⁻¹(u)
//! ```
//!
//! with location `A`, scale `B > 0`, skewness `g`, kurtosis `k ≥ 0`, and the
//! conventional constant `c = 0.8`. Sampling is exact: draw `z ~ N(0,1)` and
//! evaluate `Q(z)`. The density has no closed form; a finite-difference
//! approximation lives in [`crate::reference`].

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::{ModelId, ParamVector, Series};
use rand_distr::{Distribution, StandardNormal};

/// Conventional skewness-weight constant.
pub const DEFAULT_C: f64 = 0.8;

/// The quantile function `Q(z)` at a standard-normal deviate `z`.
pub fn quantile_fn(a: f64, b: f64, g: f64, k: f64, c: f64, z: f64) -> f64 {
    a + b * (1.0 + c * (g * z / 2.0).tanh()) * z * (1.0 + z * z).powf(k)
}

fn validate(theta: &ParamVector) -> Result<(f64, f64, f64, f64)> {
    assert_eq!(theta.model_id, ModelId::Gandk);
    let [a, b, g, k] = theta.values[..] else {
        return Err(Error::DimMismatch("g-and-k needs 4 parameters".into()));
    };
    if !(b > 0.0) {
        return Err(Error::OutOfSupport { model: ModelId::Gandk, detail: format!("B = {b} must be > 0") });
    }
    if !(k >= 0.0) {
        return Err(Error::OutOfSupport { model: ModelId::Gandk, detail: format!("k = {k} must be ≥ 0") });
    }
    Ok((a, b, g, k))
}

/// Draw `m` i.i.d. realizations `Q(z)`, `z ~ N(0,1)`.
pub fn simulate_gandk(theta: &ParamVector, m: usize, c: f64, rng: &mut Rng) -> Result<Series> {
    let (a, b, g, k) = validate(theta)?;
    Ok((0..m)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            quantile_fn(a, b, g, k, c, z)
        })
        .collect())
}
