//! Exact order-1 Wasserstein distance between equal-weight samples.
//!
//! The distance between two sets of `n` draws is the cheapest way to pair
//! them up one-to-one, where a pair costs its Euclidean distance, divided by
//! `n`. For one-dimensional draws the optimal pairing is simply
//! sorted-against-sorted; in higher dimensions the optimal assignment is
//! found exactly with the O(n³) Hungarian algorithm (potentials form). No
//! approximation is involved in either route.
//!
//! Two deliberate determinism choices:
//!
//! * the reported value is always a *canonical matching cost*: the matched
//!   pairs are reduced to a multiset of terms, sorted ascending, summed
//!   sequentially, and divided by `n`. In two or more dimensions the terms
//!   are the pair distances, and the optimum on continuous data is almost
//!   surely unique, so any exact solver produces the same bits. In one
//!   dimension the optimum is *not* unique — for nested pairs
//!   `a₁ ≤ a₂ ≤ b₁ ≤ b₂` the straight and crossed matchings tie exactly —
//!   so the terms are instead the signed interval endpoints (+upper, −lower
//!   per pair, nothing for coincident pairs). Tied matchings carry the same
//!   endpoint multiset, which makes the reported value identical no matter
//!   which optimal matching a solver happens to return;
//! * when the two samples differ in size, the larger is subsampled uniformly
//!   without replacement down to the smaller, with the RNG seeded from the
//!   larger sample's own contents. The reduction is a pure function of the
//!   inputs, and since it never looks at the smaller sample the distance
//!   stays exactly symmetric.

use crate::abc::PosteriorSample;
use crate::error::{Error, Result};
use crate::rng::{content_seed, SeedTree};

/// Order-1 Wasserstein distance between two posterior samples.
pub fn wasserstein(a: &PosteriorSample, b: &PosteriorSample) -> Result<f64> {
    wasserstein_points(&draw_rows(a), &draw_rows(b))
}

fn draw_rows(sample: &PosteriorSample) -> Vec<Vec<f64>> {
    sample.draws.iter().map(|p| p.values.clone()).collect()
}

/// [`wasserstein`] on raw point sets (one row per draw).
///
/// Dispatches to the sorted pairing for 1-D points and to the assignment
/// solver otherwise.
pub fn wasserstein_points(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    let (a, b, dim) = prepare(a, b)?;
    let terms = if dim == 1 { monotone_pairing(&a, &b) } else { optimal_pairing(&a, &b) };
    Ok(matching_cost(terms, a.len()))
}

/// [`wasserstein_points`] forced through the assignment solver regardless of
/// dimension. Exists so the 1-D shortcut can be checked against the general
/// solver on the same inputs; the two must agree bit for bit.
pub fn assignment_wasserstein(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    let (a, b, _) = prepare(a, b)?;
    Ok(matching_cost(optimal_pairing(&a, &b), a.len()))
}

/// Validate shapes and bring both samples to a common count.
fn prepare(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>, usize)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Degenerate("wasserstein requires non-empty samples".into()));
    }
    let dim = a[0].len();
    if dim == 0 {
        return Err(Error::Degenerate("wasserstein requires at least one coordinate".into()));
    }
    for row in a.iter().chain(b) {
        if row.len() != dim {
            return Err(Error::DimMismatch(format!(
                "wasserstein: draw of width {} in samples of width {dim}",
                row.len()
            )));
        }
    }
    let (a, b) = match a.len().cmp(&b.len()) {
        std::cmp::Ordering::Equal => (a.to_vec(), b.to_vec()),
        std::cmp::Ordering::Greater => (subsample(a, b.len()), b.to_vec()),
        std::cmp::Ordering::Less => (a.to_vec(), subsample(b, a.len())),
    };
    Ok((a, b, dim))
}

/// Uniform subsample without replacement, seeded purely by the sample's own
/// bit pattern.
fn subsample(rows: &[Vec<f64>], keep: usize) -> Vec<Vec<f64>> {
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    let mut rng = SeedTree::new(content_seed(&flat)).child("wasserstein-subsample").rng();
    let mut picked = rand::seq::index::sample(&mut rng, rows.len(), keep).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|i| rows[i].clone()).collect()
}

fn euclid(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Reduce one matched pair to canonical terms (see the module doc): signed
/// interval endpoints in 1-D, the Euclidean distance otherwise.
fn pair_terms(x: &[f64], y: &[f64], terms: &mut Vec<f64>) {
    if x.len() == 1 {
        if x[0] != y[0] {
            terms.push(x[0].max(y[0]));
            terms.push(-x[0].min(y[0]));
        }
    } else {
        terms.push(euclid(x, y));
    }
}

/// Canonical reduction of a matching's terms: sort, sum in order, divide by n.
fn matching_cost(mut terms: Vec<f64>, n: usize) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.iter().sum::<f64>() / n as f64
}

/// Terms of the 1-D optimal coupling: k-th smallest against k-th smallest.
fn monotone_pairing(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<f64> {
    let mut xs: Vec<&Vec<f64>> = a.iter().collect();
    let mut ys: Vec<&Vec<f64>> = b.iter().collect();
    xs.sort_by(|p, q| p[0].total_cmp(&q[0]));
    ys.sort_by(|p, q| p[0].total_cmp(&q[0]));
    let mut terms = Vec::with_capacity(2 * a.len());
    for (x, y) in xs.iter().zip(&ys) {
        pair_terms(x, y, &mut terms);
    }
    terms
}

/// Terms of the exact min-cost assignment.
fn optimal_pairing(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut cost = vec![0.0; n * n];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            cost[i * n + j] = euclid(x, y);
        }
    }
    let assign = hungarian(&cost, n);
    let mut terms = Vec::with_capacity(2 * n);
    for (i, &j) in assign.iter().enumerate() {
        pair_terms(&a[i], &b[j], &mut terms);
    }
    terms
}

/// Hungarian algorithm in potentials form, O(n³): returns the column matched
/// to each row of an n×n cost matrix under the minimum-cost assignment.
///
/// Arrays are 1-indexed with slot 0 as the conventional scratch column; `p[j]`
/// is the row currently matched to column `j`, and `way[j]` remembers the
/// alternating path used to reach `j` so the final augmentation can walk back.
fn hungarian(cost: &[f64], n: usize) -> Vec<usize> {
    debug_assert_eq!(cost.len(), n * n);
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let reduced = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                    if reduced < minv[j] {
                        minv[j] = reduced;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        // Augment: shift the matching along the alternating path back to the
        // scratch column.
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0usize; n];
    for j in 1..=n {
        assign[p[j] - 1] = j - 1;
    }
    assign
}
