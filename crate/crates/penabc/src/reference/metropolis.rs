//! Gaussian random-walk Metropolis.
//!
//! Used to draw from the near-exact g-and-k posterior (where no grid oracle
//! is practical in 4-D) and as a cross-check for the 2-D grid posteriors.

use crate::abc::PosteriorSample;
use crate::error::{Error, Result};
use crate::reference::LogDensity;
use crate::rng::Rng;
use crate::ParamVector;
use rand::Rng as _;
use rand_distr::StandardNormal;

/// A completed chain: every post-move state (the initial point excluded) and
/// the fraction of accepted proposals.
#[derive(Debug, Clone)]
pub struct MetropolisResult {
    pub chain: Vec<ParamVector>,
    pub acceptance_rate: f64,
}

/// Random-walk Metropolis with independent Gaussian proposal steps of
/// per-component scale `proposal_scale`.
pub fn rw_metropolis(
    logpost: &LogDensity,
    init: &ParamVector,
    steps: usize,
    proposal_scale: &[f64],
    rng: &mut Rng,
) -> Result<MetropolisResult> {
    assert_eq!(proposal_scale.len(), init.values.len(), "one proposal scale per parameter");
    assert!(steps > 0);
    let mut current = init.clone();
    let mut current_lp = logpost.log_density(&current);
    if !current_lp.is_finite() {
        return Err(Error::Config(format!(
            "chain must start at a point of positive posterior density, got log density {current_lp}"
        )));
    }
    let mut chain = Vec::with_capacity(steps);
    let mut accepted = 0usize;
    for _ in 0..steps {
        let proposal = ParamVector::new(
            current.model_id,
            current
                .values
                .iter()
                .zip(proposal_scale)
                .map(|(v, s)| v + s * rng.sample::<f64, _>(StandardNormal))
                .collect(),
        );
        let lp = logpost.log_density(&proposal);
        // Symmetric proposal: accept with probability min(1, exp(lp − lp₀)).
        // ln(u) < 0 strictly for u ∈ [0, 1), so a proposal at least as good as
        // the current state always passes; a zero-density one never does.
        if lp.is_finite() && rng.gen_range(0.0f64..1.0).ln() < lp - current_lp {
            current = proposal;
            current_lp = lp;
            accepted += 1;
        }
        chain.push(current.clone());
    }
    if accepted == 0 {
        return Err(Error::ZeroAcceptance(steps));
    }
    Ok(MetropolisResult { chain, acceptance_rate: accepted as f64 / steps as f64 })
}

/// Discard `burn_in` states and keep every `stride`-th one after that.
pub fn thin_chain(result: &MetropolisResult, burn_in: usize, stride: usize) -> PosteriorSample {
    assert!(stride >= 1);
    let draws = result.chain.iter().skip(burn_in).step_by(stride).cloned().collect();
    PosteriorSample::reference(draws)
}
