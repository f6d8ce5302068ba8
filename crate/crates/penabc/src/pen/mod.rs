//! Partially exchangeable networks (PENs).
//!
//! A PEN of order `d` maps a series `y` of length `M` to
//!
//! ```text
//! ρ( y_{1:d},  Σ_{i=1}^{M−d} φ(y_{i:(i+d)}),  extras )
//! ```
//!
//! where the inner network `φ` acts on every sliding window of `d+1`
//! consecutive values, the results are sum-pooled, and the outer network `ρ`
//! sees the length-`d` prefix, the pooled vector, and optional extra side
//! features. By construction the output is invariant under every applicable
//! d-block-switch transformation of `y` (see [`blockswitch`]); for `d = 0`
//! this is the DeepSets architecture, invariant under all permutations.
//!
//! Sum pooling is floating-point, so "invariant" is exact only up to
//! summation order. The pooled sum therefore uses compensated (Neumaier)
//! accumulation in window order by default, and an optional canonical mode
//! sorts each latent component before summing, making invariance checks
//! exact to the bit.

pub mod blockswitch;

pub use blockswitch::{block_switch, is_d_block_switch_invariant, pen_closure, permutation_invariance_report, plant_valid_switch, BlockSwitchIndices, InvarianceReport};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, NeumaierAcc};
use crate::neuralnet::{
    backward_batch, forward_batch, forward_batch_nocache, init_weights, mse_loss_grad, ForwardCache, MlpSpec,
    MlpWeights, ParamTensors, TrainableNet, WeightCount,
};
use crate::rng::Rng;
use crate::Series;

/// PEN architecture: Markov order, inner and outer stacks, and the number of
/// extra side features appended to the outer input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PenSpec {
    pub d: usize,
    pub inner: MlpSpec,
    pub outer: MlpSpec,
    pub extra_dim: usize,
}

impl PenSpec {
    pub fn latent_dim(&self) -> usize {
        self.inner.out_dim()
    }

    pub fn out_dim(&self) -> usize {
        self.outer.out_dim()
    }

    pub fn validate(&self) -> Result<()> {
        self.inner.validate()?;
        self.outer.validate()?;
        if self.inner.in_dim() != self.d + 1 {
            return Err(Error::Config(format!(
                "inner network takes {} inputs but windows have {} values",
                self.inner.in_dim(),
                self.d + 1
            )));
        }
        let want = self.d + self.latent_dim() + self.extra_dim;
        if self.outer.in_dim() != want {
            return Err(Error::Config(format!(
                "outer network takes {} inputs but prefix+pooled+extras is {want}",
                self.outer.in_dim()
            )));
        }
        Ok(())
    }
}

impl WeightCount for PenSpec {
    fn weight_count(&self) -> usize {
        self.inner.weight_count() + self.outer.weight_count()
    }
}

/// Inner (β_φ) and outer (β_ρ) weights; doubles as the gradient container.
#[derive(Debug, Clone, PartialEq)]
pub struct PenWeights {
    pub inner: MlpWeights,
    pub outer: MlpWeights,
}

impl PenWeights {
    pub fn zeros_like(spec: &PenSpec) -> Self {
        PenWeights { inner: MlpWeights::zeros_like(&spec.inner), outer: MlpWeights::zeros_like(&spec.outer) }
    }
}

impl ParamTensors for PenWeights {
    fn tensors(&self) -> Vec<&[f64]> {
        let mut t = self.inner.tensors();
        t.extend(self.outer.tensors());
        t
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let PenWeights { inner, outer } = self;
        let mut t = inner.tensors_mut();
        t.extend(outer.tensors_mut());
        t
    }
}

/// Glorot-uniform initialization of both sub-networks (inner first), with the
/// outer network's pooled-input columns shrunk by the window count for
/// `series_len`-length series.
///
/// The pooled block is a sum of `series_len − d` non-negative window latents,
/// so at a standard init its coordinates reach the outer network at roughly
/// `windows ×` the scale of the prefix and extras — for a length-1000 series
/// that buries every other input three orders of magnitude down and stalls
/// the first epochs of training. Dividing the first outer layer's pooled
/// columns by the window count starts every input contributing at the same
/// order of magnitude. Only the starting point changes; the forward map and
/// its invariances are untouched, and training is free to move the weights
/// wherever it likes.
pub fn init_pen_weights(spec: &PenSpec, series_len: usize, rng: &mut Rng) -> PenWeights {
    let mut w = PenWeights { inner: init_weights(&spec.inner, rng), outer: init_weights(&spec.outer, rng) };
    let windows = series_len.saturating_sub(spec.d).max(1) as f64;
    let first = &mut w.outer.layers[0];
    for r in 0..first.w.rows {
        for v in &mut first.w.row_mut(r)[spec.d..spec.d + spec.latent_dim()] {
            *v /= windows;
        }
    }
    w
}

/// How window latents are accumulated into the pooled vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PoolOrder {
    /// Window order with Neumaier compensation: fast, reordering-stable to
    /// ~1e-12 relative.
    #[default]
    Stream,
    /// Sort each latent component before summing: bit-exact under any
    /// permutation of the windows.
    Canonical,
}

/// All sliding windows of `d+1` consecutive values: `M − d` rows.
pub fn windows(y: &[f64], d: usize) -> Result<Matrix> {
    let m = y.len();
    if m <= d {
        return Err(Error::DimMismatch(format!("series of length {m} has no windows of {} values", d + 1)));
    }
    let count = m - d;
    let width = d + 1;
    let mut data = Vec::with_capacity(count * width);
    for i in 0..count {
        data.extend_from_slice(&y[i..i + width]);
    }
    Ok(Matrix::from_vec(count, width, data))
}

/// Stack the windows of every series in a (B × M) batch: sample-major rows.
fn batch_windows(series: &Matrix, d: usize) -> Result<Matrix> {
    let m = series.cols;
    if m <= d {
        return Err(Error::DimMismatch(format!("series of length {m} has no windows of {} values", d + 1)));
    }
    let per = m - d;
    let width = d + 1;
    let mut data = Vec::with_capacity(series.rows * per * width);
    for s in 0..series.rows {
        let row = series.row(s);
        for i in 0..per {
            data.extend_from_slice(&row[i..i + width]);
        }
    }
    Ok(Matrix::from_vec(series.rows * per, width, data))
}

/// Sum-pool inner outputs per sample: rows `[s·per, (s+1)·per)` collapse to
/// one pooled row per sample.
fn pool(inner_out: &Matrix, n_samples: usize, per: usize, order: PoolOrder) -> Matrix {
    debug_assert_eq!(inner_out.rows, n_samples * per);
    let latent = inner_out.cols;
    let mut pooled = Matrix::zeros(n_samples, latent);
    match order {
        PoolOrder::Stream => {
            for s in 0..n_samples {
                let mut acc = NeumaierAcc::new(latent);
                for r in s * per..(s + 1) * per {
                    acc.add_row(inner_out.row(r));
                }
                pooled.row_mut(s).copy_from_slice(&acc.finish());
            }
        }
        PoolOrder::Canonical => {
            let mut column = vec![0.0; per];
            for s in 0..n_samples {
                for c in 0..latent {
                    for (slot, r) in column.iter_mut().zip(s * per..(s + 1) * per) {
                        *slot = inner_out.at(r, c);
                    }
                    column.sort_by(f64::total_cmp);
                    *pooled.at_mut(s, c) = column.iter().sum();
                }
            }
        }
    }
    pooled
}

/// Assemble outer-network inputs: `[prefix | pooled | extras]` per sample.
fn outer_input(spec: &PenSpec, series: &Matrix, pooled: &Matrix, extras: &Matrix) -> Matrix {
    let b = series.rows;
    let mut out = Matrix::zeros(b, spec.d + spec.latent_dim() + spec.extra_dim);
    for s in 0..b {
        let row = out.row_mut(s);
        row[..spec.d].copy_from_slice(&series.row(s)[..spec.d]);
        row[spec.d..spec.d + spec.latent_dim()].copy_from_slice(pooled.row(s));
        row[spec.d + spec.latent_dim()..].copy_from_slice(extras.row(s));
    }
    out
}

/// Everything the backward pass needs from a batched PEN forward.
#[derive(Debug, Clone)]
pub struct PenCache {
    pub inner: ForwardCache,
    pub outer: ForwardCache,
    pub n_samples: usize,
    pub windows_per_sample: usize,
}

impl PenCache {
    pub fn output(&self) -> &Matrix {
        self.outer.output()
    }
}

fn check_shapes(spec: &PenSpec, series: &Matrix, extras: &Matrix) -> Result<()> {
    spec.validate()?;
    if extras.rows != series.rows || extras.cols != spec.extra_dim {
        return Err(Error::DimMismatch(format!(
            "extras must be {} × {}, got {} × {}",
            series.rows, spec.extra_dim, extras.rows, extras.cols
        )));
    }
    Ok(())
}

/// Batched PEN forward with cache retention (training path).
pub fn pen_forward_batch(
    spec: &PenSpec,
    w: &PenWeights,
    series: &Matrix,
    extras: &Matrix,
    order: PoolOrder,
) -> Result<PenCache> {
    check_shapes(spec, series, extras)?;
    let wins = batch_windows(series, spec.d)?;
    let per = series.cols - spec.d;
    let inner = forward_batch(&spec.inner, &w.inner, &wins);
    let pooled = pool(inner.output(), series.rows, per, order);
    let oin = outer_input(spec, series, &pooled, extras);
    let outer = forward_batch(&spec.outer, &w.outer, &oin);
    Ok(PenCache { inner, outer, n_samples: series.rows, windows_per_sample: per })
}

/// Batched PEN forward keeping only the predictions (evaluation path).
pub fn pen_forward_batch_nocache(
    spec: &PenSpec,
    w: &PenWeights,
    series: &Matrix,
    extras: &Matrix,
    order: PoolOrder,
) -> Result<Matrix> {
    check_shapes(spec, series, extras)?;
    let wins = batch_windows(series, spec.d)?;
    let per = series.cols - spec.d;
    let inner_out = forward_batch_nocache(&spec.inner, &w.inner, &wins);
    drop(wins);
    let pooled = pool(&inner_out, series.rows, per, order);
    drop(inner_out);
    let oin = outer_input(spec, series, &pooled, extras);
    Ok(forward_batch_nocache(&spec.outer, &w.outer, &oin))
}

/// Single-series PEN forward: the prediction and the cache.
pub fn pen_forward(spec: &PenSpec, w: &PenWeights, y: &Series, extras: &[f64]) -> Result<(Vec<f64>, PenCache)> {
    let series = Matrix::from_vec(1, y.len(), y.clone());
    let ex = Matrix::from_vec(1, extras.len(), extras.to_vec());
    let cache = pen_forward_batch(spec, w, &series, &ex, PoolOrder::Stream)?;
    Ok((cache.output().row(0).to_vec(), cache))
}

/// Single-series PEN prediction without cache.
pub fn pen_predict(spec: &PenSpec, w: &PenWeights, y: &[f64], extras: &[f64], order: PoolOrder) -> Result<Vec<f64>> {
    let series = Matrix::from_vec(1, y.len(), y.to_vec());
    let ex = Matrix::from_vec(1, extras.len(), extras.to_vec());
    Ok(pen_forward_batch_nocache(spec, w, &series, &ex, order)?.row(0).to_vec())
}

/// Backpropagate through outer network, pooling, and inner network.
///
/// The pooled sum distributes its gradient unchanged to every window row, so
/// the inner gradient is the batch backward over all windows with the
/// per-sample outer gradient broadcast onto each of its windows.
pub fn pen_backward_batch(spec: &PenSpec, w: &PenWeights, cache: &PenCache, grad_out: &Matrix) -> PenWeights {
    assert_eq!(grad_out.rows, cache.n_samples);
    assert_eq!(grad_out.cols, spec.out_dim());
    let (outer_grads, d_outer_in) = backward_batch(&spec.outer, &w.outer, &cache.outer, grad_out);
    let latent = spec.latent_dim();
    let per = cache.windows_per_sample;
    let mut d_inner_out = Matrix::zeros(cache.n_samples * per, latent);
    for s in 0..cache.n_samples {
        let dp = &d_outer_in.row(s)[spec.d..spec.d + latent];
        for r in s * per..(s + 1) * per {
            d_inner_out.row_mut(r).copy_from_slice(dp);
        }
    }
    let (inner_grads, _) = backward_batch(&spec.inner, &w.inner, &cache.inner, &d_inner_out);
    PenWeights { inner: inner_grads, outer: outer_grads }
}

/// Single-series PEN backward (gradients for β_φ and β_ρ).
pub fn pen_backward(spec: &PenSpec, w: &PenWeights, cache: &PenCache, grad_out: &[f64]) -> PenWeights {
    let g = Matrix::from_vec(1, grad_out.len(), grad_out.to_vec());
    pen_backward_batch(spec, w, cache, &g)
}

/// A PEN viewed as a trainable regressor on flat rows `[series | extras]`.
#[derive(Debug, Clone)]
pub struct PenNet {
    pub spec: PenSpec,
    pub series_len: usize,
    pub pool: PoolOrder,
}

impl PenNet {
    pub fn new(spec: PenSpec, series_len: usize) -> Self {
        PenNet { spec, series_len, pool: PoolOrder::Stream }
    }

    pub fn input_len(&self) -> usize {
        self.series_len + self.spec.extra_dim
    }

    fn split(&self, x: &Matrix) -> (Matrix, Matrix) {
        assert_eq!(x.cols, self.input_len(), "rows must be [series | extras]");
        let mut series = Matrix::zeros(x.rows, self.series_len);
        let mut extras = Matrix::zeros(x.rows, self.spec.extra_dim);
        for r in 0..x.rows {
            series.row_mut(r).copy_from_slice(&x.row(r)[..self.series_len]);
            extras.row_mut(r).copy_from_slice(&x.row(r)[self.series_len..]);
        }
        (series, extras)
    }
}

impl TrainableNet for PenNet {
    type Weights = PenWeights;

    fn loss_and_grads(&self, w: &PenWeights, x: &Matrix, targets: &Matrix) -> (f64, PenWeights) {
        let (series, extras) = self.split(x);
        let cache = pen_forward_batch(&self.spec, w, &series, &extras, self.pool).expect("validated spec and shapes");
        let (loss, grad_pred) = mse_loss_grad(cache.output(), targets);
        let grads = pen_backward_batch(&self.spec, w, &cache, &grad_pred);
        (loss, grads)
    }

    fn predict(&self, w: &PenWeights, x: &Matrix) -> Matrix {
        let (series, extras) = self.split(x);
        pen_forward_batch_nocache(&self.spec, w, &series, &extras, self.pool).expect("validated spec and shapes")
    }
}
