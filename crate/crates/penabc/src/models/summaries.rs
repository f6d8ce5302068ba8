//! Handpicked summary statistics — the non-learned baseline.
//!
//! * g-and-k: four percentiles and the sample skewness,
//!   `S(y) = [P₂₀, P₄₀, P₆₀, P₈₀, skew(y)]`.
//! * α-stable: the five quantiles behind McCulloch's quantile estimators,
//!   `[P₅, P₂₅, P₅₀, P₇₅, P₉₅]`.
//! * AR(2): autocovariances at lags 1–5.
//! * MA(2): autocovariances at lags 1–2.
//!
//! Conventions are pinned so tests are exact: type-7 percentiles, biased
//! autocovariance `γ(y,k) = (1/M) Σ_{l=1}^{M−k} (y_l − ȳ)(y_{l+k} − ȳ)`, and
//! skewness `m₃/m₂^{3/2}` with central moments over `M`.

use crate::error::{Error, Result};
use crate::models::preprocess::percentile_of_sorted;
use crate::ModelId;

/// Biased sample autocovariance with divisor `M`.
pub fn autocovariance(y: &[f64], lag: usize) -> f64 {
    let m = y.len();
    assert!(lag < m, "lag {lag} needs more than {m} points");
    let mean = y.iter().sum::<f64>() / m as f64;
    let mut s = 0.0;
    for l in 0..m - lag {
        s += (y[l] - mean) * (y[l + lag] - mean);
    }
    s / m as f64
}

/// Sample skewness `m₃/m₂^{3/2}`; 0 for a constant series.
pub fn skewness(y: &[f64]) -> f64 {
    let m = y.len() as f64;
    let mean = y.iter().sum::<f64>() / m;
    let (mut m2, mut m3) = (0.0, 0.0);
    for &v in y {
        let d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= m;
    m3 /= m;
    if m2 == 0.0 {
        0.0
    } else {
        m3 / m2.powf(1.5)
    }
}

/// The handpicked summary vector for one model.
pub fn handpicked_summaries(model_id: ModelId, y: &[f64]) -> Result<Vec<f64>> {
    let need = |min_len: usize| -> Result<()> {
        if y.len() <= min_len {
            Err(Error::Degenerate(format!(
                "series of length {} too short for {model_id:?} summaries",
                y.len()
            )))
        } else {
            Ok(())
        }
    };
    match model_id {
        ModelId::Gandk => {
            need(0)?;
            let mut sorted = y.to_vec();
            sorted.sort_by(f64::total_cmp);
            let mut s: Vec<f64> =
                [20.0, 40.0, 60.0, 80.0].iter().map(|&p| percentile_of_sorted(&sorted, p)).collect();
            // Skewness of the sorted copy: same value (the statistic is
            // symmetric), but bit-exact under permutations of the input.
            s.push(skewness(&sorted));
            Ok(s)
        }
        ModelId::AlphaStable => {
            need(0)?;
            let mut sorted = y.to_vec();
            sorted.sort_by(f64::total_cmp);
            Ok([5.0, 25.0, 50.0, 75.0, 95.0].iter().map(|&p| percentile_of_sorted(&sorted, p)).collect())
        }
        ModelId::Ar2 => {
            need(5)?;
            Ok((1..=5).map(|k| autocovariance(y, k)).collect())
        }
        ModelId::Ma2 => {
            need(2)?;
            Ok((1..=2).map(|k| autocovariance(y, k)).collect())
        }
    }
}
