//! Reference-table ABC rejection sampling.
//!
//! The sampling scheme is the classic rejection recipe: draw Ñ parameter
//! proposals from the prior, simulate a dataset for each, summarize every
//! dataset with a summary transform `S`, and retain the proposals whose
//! summaries fall closest to the observed summary under a weighted Euclidean
//! (diagonal Mahalanobis) distance. "Closest" means the smallest
//! `floor(Ñ·x/100)` distances for a retention percentile `x`, with ties
//! broken by table index so the retained set is deterministic.
//!
//! The expensive part — the (θ, y) reference table — is built once per model
//! and recycled across summary methods: [`summarize_table`] only fills the
//! summary column, never touching the simulated draws.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::models::{simulate, PriorSpec};
use crate::rng::{Rng, SeedTree};
use crate::{ModelId, ParamVector, Series};
use rand::Rng as _;

/// Ñ prior draws with their simulated datasets, and optionally the summary
/// statistics of every dataset under the current summary method.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceTable {
    pub model_id: ModelId,
    pub series_len: usize,
    pub params: Vec<ParamVector>,
    pub series: Vec<Series>,
    pub summaries: Option<Vec<Vec<f64>>>,
}

impl ReferenceTable {
    pub fn n_tilde(&self) -> usize {
        self.params.len()
    }
}

/// Rejection settings: table size, retention percentile, and the diagonal of
/// the distance metric A.
#[derive(Debug, Clone, PartialEq)]
pub struct AbcConfig {
    pub n_tilde: usize,
    pub percentile_x: f64,
    pub metric_weights: Vec<f64>,
}

impl AbcConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_tilde == 0 {
            return Err(Error::Config("n_tilde must be at least 1".into()));
        }
        if !(self.percentile_x > 0.0 && self.percentile_x < 100.0) {
            return Err(Error::Config(format!(
                "retention percentile must lie in (0, 100), got {}",
                self.percentile_x
            )));
        }
        if self.metric_weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::Config("metric weights must be positive and finite".into()));
        }
        Ok(())
    }

    /// Number of proposals the percentile rule retains.
    pub fn retention_count(&self) -> usize {
        (self.n_tilde as f64 * self.percentile_x / 100.0).floor() as usize
    }
}

/// Where a set of posterior draws came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleSource {
    Abc,
    Reference,
}

/// Draws from a posterior (ABC-approximate or reference), with the ABC
/// acceptance distances when they exist.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSample {
    pub draws: Vec<ParamVector>,
    /// Parallel to `draws` for ABC output; empty for reference samples.
    pub distances: Vec<f64>,
    pub source: SampleSource,
}

impl PosteriorSample {
    pub fn reference(draws: Vec<ParamVector>) -> Self {
        PosteriorSample { draws, distances: vec![], source: SampleSource::Reference }
    }

    /// Component-wise mean of the draws.
    pub fn mean(&self) -> Vec<f64> {
        assert!(!self.draws.is_empty(), "posterior sample is empty");
        let p = self.draws[0].values.len();
        let mut mean = vec![0.0; p];
        for draw in &self.draws {
            for (m, v) in mean.iter_mut().zip(&draw.values) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= self.draws.len() as f64;
        }
        mean
    }
}

/// Draw Ñ i.i.d. (θ, y) pairs. Each pair gets its own seed derived from the
/// caller's stream, so tables are reproducible and could be filled in any
/// order.
pub fn build_reference_table(
    model_id: ModelId,
    prior: &PriorSpec,
    m: usize,
    n_tilde: usize,
    rng: &mut Rng,
) -> Result<ReferenceTable> {
    assert_eq!(prior.model_id, model_id, "prior and table model must agree");
    if n_tilde == 0 {
        return Err(Error::Config("n_tilde must be at least 1".into()));
    }
    let tree = SeedTree::new(rng.gen::<u64>());
    let theta_tree = tree.child("proposal");
    let sim_tree = tree.child("dataset");
    let mut params = Vec::with_capacity(n_tilde);
    let mut series = Vec::with_capacity(n_tilde);
    for i in 0..n_tilde {
        let theta = prior.sample(&mut theta_tree.index_rng(i as u64));
        let y = simulate(&theta, m, &mut sim_tree.index_rng(i as u64))
            .map_err(|e| Error::Simulator { index: i, source: Box::new(e) })?;
        params.push(theta);
        series.push(y);
    }
    Ok(ReferenceTable { model_id, series_len: m, params, series, summaries: None })
}

/// Fill the summary column: `summaries[i] = summary_fn(series[i])`. The
/// (θ, y) entries are never touched, so one table serves every summary
/// method in turn.
pub fn summarize_table<F>(table: &mut ReferenceTable, mut summary_fn: F) -> Result<()>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let mut summaries = Vec::with_capacity(table.n_tilde());
    let mut width = None;
    for (i, y) in table.series.iter().enumerate() {
        let s = summary_fn(y).map_err(|e| Error::Simulator { index: i, source: Box::new(e) })?;
        if s.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSummary(i));
        }
        if *width.get_or_insert(s.len()) != s.len() {
            return Err(Error::DimMismatch(format!(
                "summary at index {i} has {} components, earlier ones had {}",
                s.len(),
                width.unwrap()
            )));
        }
        summaries.push(s);
    }
    table.summaries = Some(summaries);
    Ok(())
}

/// Weighted Euclidean distance `√(Σ w_c (s*_c − s_obs_c)²)` — the Mahalanobis
/// distance for the diagonal metric A = diag(w).
pub fn mahalanobis(s_star: &[f64], s_obs: &[f64], diag_weights: &[f64]) -> Result<f64> {
    if s_star.len() != s_obs.len() || s_star.len() != diag_weights.len() {
        return Err(Error::DimMismatch(format!(
            "mahalanobis arguments have lengths {}, {}, {}",
            s_star.len(),
            s_obs.len(),
            diag_weights.len()
        )));
    }
    debug_assert!(diag_weights.iter().all(|w| *w > 0.0));
    let mut acc = 0.0;
    for ((a, b), w) in s_star.iter().zip(s_obs).zip(diag_weights) {
        let d = a - b;
        acc += w * d * d;
    }
    Ok(acc.sqrt())
}

/// A finite distance paired with its table index, ordered lexicographically
/// so the retained set under ties is the lowest-index one.
#[derive(PartialEq)]
struct Candidate {
    distance: f64,
    index: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.distance.total_cmp(&other.distance).then(self.index.cmp(&other.index))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Retain the `floor(Ñ·x/100)` proposals whose summaries are closest to
/// `s_obs`. Distances stream through a bounded max-heap, so the full distance
/// vector is never materialized.
pub fn rejection_sample(
    table: &ReferenceTable,
    s_obs: &[f64],
    percentile_x: f64,
    metric_weights: &[f64],
) -> Result<PosteriorSample> {
    let summaries = table
        .summaries
        .as_ref()
        .ok_or_else(|| Error::Config("reference table has no summaries; summarize it first".into()))?;
    let cfg = AbcConfig {
        n_tilde: table.n_tilde(),
        percentile_x,
        metric_weights: metric_weights.to_vec(),
    };
    cfg.validate()?;
    let keep = cfg.retention_count();
    if keep == 0 {
        return Err(Error::EmptyRetention);
    }

    let mut heap: BinaryHeap<Candidate> = BinaryHeap::with_capacity(keep + 1);
    for (index, s) in summaries.iter().enumerate() {
        let distance = mahalanobis(s, s_obs, metric_weights)?;
        heap.push(Candidate { distance, index });
        if heap.len() > keep {
            heap.pop();
        }
    }

    let mut retained: Vec<Candidate> = heap.into_vec();
    retained.sort_unstable_by(|a, b| a.cmp(b));
    let draws = retained.iter().map(|c| table.params[c.index].clone()).collect();
    let distances = retained.iter().map(|c| c.distance).collect();
    Ok(PosteriorSample { draws, distances, source: SampleSource::Abc })
}
