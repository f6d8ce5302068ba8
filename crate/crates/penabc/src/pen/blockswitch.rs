//! Block-switch transformations and invariance probes.
//!
//! A d-block-switch picks two disjoint blocks `y[i..j]` and `y[k..l]` whose
//! first `d` and last `d` values agree, and swaps them:
//!
//! ```text
//! y[0..i] ++ y[k..l] ++ y[j..k] ++ y[i..j] ++ y[l..M]
//! ```
//!
//! When the agreement guards fail the transformation is the identity. Every
//! applicable switch preserves the multiset of values, the multiset of
//! sliding windows of length `d+1`, and the length-`d` prefix — which is why
//! a PEN of order `d` cannot distinguish `y` from its switched versions.
//! Order-0 switches compose to arbitrary permutations.
//!
//! Swapping back with the *same* indices restores the input when the two
//! blocks have equal length; unequal blocks shift the middle segment, so the
//! reverse switch lives at different indices.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::pen::{pen_forward_batch_nocache, PenSpec, PenWeights, PoolOrder};
use crate::rng::Rng;
use crate::Series;
use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::StandardNormal;

/// The index tuple `(i, j, k, l)` of a d-block-switch, `0 ≤ i ≤ j < k ≤ l ≤ M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockSwitchIndices {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub l: usize,
    pub d: usize,
}

impl BlockSwitchIndices {
    pub fn validate(&self, m: usize) -> Result<()> {
        let BlockSwitchIndices { i, j, k, l, d } = *self;
        let ordered = i <= j && j < k && k <= l && l <= m;
        if !ordered {
            return Err(Error::Config(format!(
                "block-switch indices ({i},{j},{k},{l}) must satisfy i ≤ j < k ≤ l ≤ {m}"
            )));
        }
        if j - i < d || l - k < d {
            return Err(Error::Config(format!(
                "blocks [{i},{j}) and [{k},{l}) must each span at least d = {d} values"
            )));
        }
        Ok(())
    }
}

/// Swap blocks `y[i..j]` and `y[k..l]` if their d-prefixes and d-suffixes
/// agree; return `y` unchanged otherwise.
pub fn block_switch(y: &[f64], b: &BlockSwitchIndices) -> Result<Series> {
    b.validate(y.len())?;
    let BlockSwitchIndices { i, j, k, l, d } = *b;
    let applicable = y[i..i + d] == y[k..k + d] && y[j - d..j] == y[l - d..l];
    if !applicable {
        return Ok(y.to_vec());
    }
    let mut out = Vec::with_capacity(y.len());
    out.extend_from_slice(&y[..i]);
    out.extend_from_slice(&y[k..l]);
    out.extend_from_slice(&y[j..k]);
    out.extend_from_slice(&y[i..j]);
    out.extend_from_slice(&y[l..]);
    Ok(out)
}

/// Generate a standard-normal series of length `m` with an applicable
/// d-block-switch planted in it (guard values copied between the blocks).
///
/// Blocks are at least `2d+1` long so the planted prefix and suffix regions
/// never overlap; lengths are otherwise random and usually unequal.
pub fn plant_valid_switch(m: usize, d: usize, rng: &mut Rng) -> Result<(Series, BlockSwitchIndices)> {
    let min_m = 2 * (2 * d + 1) + 1;
    if m < min_m {
        return Err(Error::Config(format!(
            "length {m} cannot hold two blocks of {} values and a gap (need ≥ {min_m})",
            2 * d + 1
        )));
    }
    let mut slack = m - min_m;
    let mut take = |rng: &mut Rng| {
        let part = rng.gen_range(0..=slack);
        slack -= part;
        part
    };
    let head = take(rng);
    let len_a = 2 * d + 1 + take(rng);
    let mid = 1 + take(rng);
    let len_b = 2 * d + 1 + take(rng);
    // Remaining slack becomes the tail.
    let i = head;
    let j = i + len_a;
    let k = j + mid;
    let l = k + len_b;

    let mut y: Series = (0..m).map(|_| rng.sample(StandardNormal)).collect();
    let (prefix, suffix) = (y[i..i + d].to_vec(), y[j - d..j].to_vec());
    y[k..k + d].copy_from_slice(&prefix);
    y[l - d..l].copy_from_slice(&suffix);
    Ok((y, BlockSwitchIndices { i, j, k, l, d }))
}

/// Outcome of an invariance probe: the largest output discrepancy seen.
#[derive(Debug, Clone, Copy)]
pub struct InvarianceReport {
    pub trials: usize,
    pub max_rel_discrepancy: f64,
}

/// Component-wise discrepancy relative to the larger magnitude, with an
/// absolute floor of 1 so near-zero outputs do not inflate the ratio.
fn rel_discrepancy(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "f must return a fixed-length vector");
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(1.0))
        .fold(0.0, f64::max)
}

/// Probe whether `f` is invariant under d-block-switches: plant `trials`
/// applicable switches in random series of length `m` and report the largest
/// relative discrepancy between `f(y)` and `f(T(y))`.
pub fn is_d_block_switch_invariant<F>(
    mut f: F,
    m: usize,
    d: usize,
    trials: usize,
    rng: &mut Rng,
) -> Result<InvarianceReport>
where
    F: FnMut(&[f64]) -> Vec<f64>,
{
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let (y, b) = plant_valid_switch(m, d, rng)?;
        let switched = block_switch(&y, &b)?;
        debug_assert_ne!(y, switched, "planted switches move at least one value");
        worst = worst.max(rel_discrepancy(&f(&y), &f(&switched)));
    }
    Ok(InvarianceReport { trials, max_rel_discrepancy: worst })
}

/// Same probe under full random permutations (the order-0 symmetry).
pub fn permutation_invariance_report<F>(mut f: F, m: usize, trials: usize, rng: &mut Rng) -> InvarianceReport
where
    F: FnMut(&[f64]) -> Vec<f64>,
{
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let y: Series = (0..m).map(|_| rng.sample(StandardNormal)).collect();
        let mut shuffled = y.clone();
        shuffled.shuffle(rng);
        worst = worst.max(rel_discrepancy(&f(&y), &f(&shuffled)));
    }
    InvarianceReport { trials, max_rel_discrepancy: worst }
}

/// Convenience closure for probing a PEN without extra features.
pub fn pen_closure<'a>(
    spec: &'a PenSpec,
    w: &'a PenWeights,
    order: PoolOrder,
) -> impl FnMut(&[f64]) -> Vec<f64> + 'a {
    move |y: &[f64]| {
        let series = Matrix::from_vec(1, y.len(), y.to_vec());
        let extras = Matrix::zeros(1, 0);
        pen_forward_batch_nocache(spec, w, &series, &extras, order)
            .expect("series length fixed by caller")
            .row(0)
            .to_vec()
    }
}
