//! Forward and backward passes.
//!
//! Data flows in batches: `x` is (batch × in_dim), weights are
//! (out_dim × in_dim), so a layer computes `act(x·Wᵀ + b)` row-wise. The
//! backward pass returns gradients in an [`MlpWeights`]-shaped container plus
//! the gradient with respect to the input batch — the latter is what lets a
//! composite architecture route gradients through a pooled representation.

use crate::error::{Error, Result};
use crate::linalg::{add_bias_rows, col_sums, matmul, matmul_nt, matmul_tn, Matrix};
use crate::neuralnet::{Activation, MlpSpec, MlpWeights};
use crate::rng::Rng;
use rand::Rng as _;

/// Glorot-uniform weights (|w| ≤ √(6/(in+out))), zero biases.
pub fn init_weights(spec: &MlpSpec, rng: &mut Rng) -> MlpWeights {
    let mut weights = MlpWeights::zeros_like(spec);
    for (lw, ls) in weights.layers.iter_mut().zip(&spec.layers) {
        let bound = (6.0 / (ls.in_dim + ls.out_dim) as f64).sqrt();
        for v in lw.w.data.iter_mut() {
            *v = rng.gen_range(-bound..bound);
        }
    }
    weights
}

/// Post-activation values kept by the forward pass for backprop.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    /// The input batch.
    pub input: Matrix,
    /// `post[i]` is the activated output of layer `i`; the last one is the
    /// network output.
    pub post: Vec<Matrix>,
}

impl ForwardCache {
    pub fn output(&self) -> &Matrix {
        self.post.last().expect("cache from at least one layer")
    }
}

fn apply_activation(m: &mut Matrix, act: Activation) {
    if act == Activation::Relu {
        for v in m.data.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
    }
}

fn layer_forward(lw: &crate::neuralnet::LayerWeights, x: &Matrix, act: Activation) -> Matrix {
    let mut out = matmul_nt(x, &lw.w);
    add_bias_rows(&mut out, &lw.b);
    apply_activation(&mut out, act);
    out
}

/// Forward pass over a batch, retaining activations for [`backward_batch`].
pub fn forward_batch(spec: &MlpSpec, w: &MlpWeights, x: &Matrix) -> ForwardCache {
    assert_eq!(x.cols, spec.in_dim(), "input width must match first layer");
    let mut post = Vec::with_capacity(w.layers.len());
    let mut cur = x;
    for (lw, ls) in w.layers.iter().zip(&spec.layers) {
        post.push(layer_forward(lw, cur, ls.activation));
        cur = post.last().unwrap();
    }
    ForwardCache { input: x.clone(), post }
}

/// Forward pass that keeps only the output (evaluation / summarization path).
pub fn forward_batch_nocache(spec: &MlpSpec, w: &MlpWeights, x: &Matrix) -> Matrix {
    assert_eq!(x.cols, spec.in_dim(), "input width must match first layer");
    let mut cur = layer_forward(&w.layers[0], x, spec.layers[0].activation);
    for (lw, ls) in w.layers.iter().zip(&spec.layers).skip(1) {
        cur = layer_forward(lw, &cur, ls.activation);
    }
    cur
}

/// Single-sample forward: returns the output vector and the cache.
pub fn forward(spec: &MlpSpec, w: &MlpWeights, x: &[f64]) -> (Vec<f64>, ForwardCache) {
    let cache = forward_batch(spec, w, &Matrix::from_vec(1, x.len(), x.to_vec()));
    (cache.output().row(0).to_vec(), cache)
}

/// Backpropagate `grad_out` (batch × out_dim) through the network.
///
/// Returns gradients for every weight and bias plus the gradient with
/// respect to the input batch.
pub fn backward_batch(
    spec: &MlpSpec,
    w: &MlpWeights,
    cache: &ForwardCache,
    grad_out: &Matrix,
) -> (MlpWeights, Matrix) {
    let n_layers = w.layers.len();
    assert_eq!(grad_out.rows, cache.input.rows);
    assert_eq!(grad_out.cols, spec.out_dim());
    let mut grads = MlpWeights::zeros_like(spec);
    let mut dpost = grad_out.clone();
    for l in (0..n_layers).rev() {
        // ReLU derivative from the cached post-activation: post > 0 ⇔ pre > 0.
        if spec.layers[l].activation == Activation::Relu {
            let post = &cache.post[l];
            for (d, p) in dpost.data.iter_mut().zip(&post.data) {
                if *p <= 0.0 {
                    *d = 0.0;
                }
            }
        }
        let layer_input = if l == 0 { &cache.input } else { &cache.post[l - 1] };
        grads.layers[l].w = matmul_tn(&dpost, layer_input);
        grads.layers[l].b = col_sums(&dpost);
        dpost = matmul(&dpost, &w.layers[l].w);
    }
    (grads, dpost)
}

/// Single-sample backward: gradient container plus input gradient.
pub fn backward(spec: &MlpSpec, w: &MlpWeights, cache: &ForwardCache, grad_out: &[f64]) -> (MlpWeights, Vec<f64>) {
    let g = Matrix::from_vec(1, grad_out.len(), grad_out.to_vec());
    let (grads, dx) = backward_batch(spec, w, cache, &g);
    (grads, dx.data)
}

/// Mean squared error over a batch: mean over rows of the squared Euclidean
/// distance between prediction and target rows.
pub fn mse_loss(pred: &Matrix, target: &Matrix) -> f64 {
    assert_eq!((pred.rows, pred.cols), (target.rows, target.cols), "loss shape mismatch");
    let mut s = 0.0;
    for (p, t) in pred.data.iter().zip(&target.data) {
        let d = p - t;
        s += d * d;
    }
    s / pred.rows as f64
}

/// MSE and its gradient with respect to the predictions: `2(pred − target)/B`.
pub fn mse_loss_grad(pred: &Matrix, target: &Matrix) -> (f64, Matrix) {
    let loss = mse_loss(pred, target);
    let scale = 2.0 / pred.rows as f64;
    let grad = Matrix::from_vec(
        pred.rows,
        pred.cols,
        pred.data.iter().zip(&target.data).map(|(p, t)| scale * (p - t)).collect(),
    );
    (loss, grad)
}

/// Fail fast when a loss goes non-finite (exploding optimization).
pub fn check_finite_loss(loss: f64, epoch: usize, batch: usize) -> Result<()> {
    if loss.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFiniteLoss { epoch, batch })
    }
}
