//! Root-mean-square error over repeated estimates.
//!
//! Convention: the squared errors of *all* parameter components are summed
//! within each repetition before averaging over the R repetitions,
//!
//! RMSE = √( (1/R) · Σᵢ Σⱼ (θ̂ʲᵢ − θʲ)² ),
//!
//! so a single repetition with unit error in each of four components scores
//! exactly 2, not 1.

use crate::error::{Error, Result};
use crate::ParamVector;

/// RMSE of point estimates against a known truth.
pub fn rmse(estimates: &[ParamVector], truth: &ParamVector) -> Result<f64> {
    let rows: Vec<Vec<f64>> = estimates.iter().map(|p| p.values.clone()).collect();
    rmse_values(&rows, &truth.values)
}

/// [`rmse`] on raw component vectors.
pub fn rmse_values(estimates: &[Vec<f64>], truth: &[f64]) -> Result<f64> {
    if estimates.is_empty() {
        return Err(Error::Degenerate("rmse requires at least one estimate".into()));
    }
    let mut total = 0.0;
    for (i, est) in estimates.iter().enumerate() {
        if est.len() != truth.len() {
            return Err(Error::DimMismatch(format!(
                "rmse: estimate {i} has {} components, truth has {}",
                est.len(),
                truth.len()
            )));
        }
        total += est.iter().zip(truth).map(|(e, t)| (e - t) * (e - t)).sum::<f64>();
    }
    Ok((total / estimates.len() as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ModelId;

    #[test]
    fn perfect_estimates_score_zero() {
        let truth = ParamVector::new(ModelId::Ar2, vec![0.4, -0.2]);
        let estimates = vec![truth.clone(); 5];
        assert_eq!(rmse(&estimates, &truth).unwrap(), 0.0);
    }

    #[test]
    fn single_repetition_sums_components_inside_the_root() {
        // One estimate off by 1 in each of four components: √4 = 2.
        let truth = ParamVector::new(ModelId::Gandk, vec![0.0; 4]);
        let estimate = ParamVector::new(ModelId::Gandk, vec![1.0; 4]);
        assert_eq!(rmse(&[estimate], &truth).unwrap(), 2.0);
    }

    #[test]
    fn scaling_errors_scales_the_score() {
        let truth = vec![1.0, 2.0];
        let estimates = vec![vec![1.3, 1.8], vec![0.6, 2.9]];
        let base = rmse_values(&estimates, &truth).unwrap();
        let scaled: Vec<Vec<f64>> =
            estimates.iter().map(|e| e.iter().zip(&truth).map(|(v, t)| t + 2.5 * (v - t)).collect()).collect();
        let score = rmse_values(&scaled, &truth).unwrap();
        assert!((score - 2.5 * base).abs() < 1e-12 * base);
    }

    #[test]
    fn averages_over_repetitions() {
        // Two repetitions with squared-error sums 4 and 0: √(4/2) = √2.
        let truth = vec![0.0];
        let estimates = vec![vec![2.0], vec![0.0]];
        assert!((rmse_values(&estimates, &truth).unwrap() - 2.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn shape_problems_are_reported() {
        assert!(rmse_values(&[], &[0.0]).is_err());
        let err = rmse_values(&[vec![1.0, 2.0]], &[0.0]).unwrap_err();
        assert!(matches!(err, Error::DimMismatch(_)));
    }
}
