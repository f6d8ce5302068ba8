//! A minimal dense feed-forward engine: just enough to regress posterior
//! means. Layers are affine maps with ReLU or identity activations; training
//! is Adam on mean squared error with "train N epochs, keep the best
//! evaluation snapshot" early stopping. Everything runs in `f64` — the
//! networks are tiny, and double precision keeps gradient checks tight and
//! results deterministic.

pub mod adam;
pub mod mlp;
pub mod train;

pub use adam::{adam_step, AdamState};
pub use mlp::{backward, backward_batch, forward, forward_batch, forward_batch_nocache, init_weights, mse_loss, mse_loss_grad, ForwardCache};
pub use train::{train, Dataset, EpochLog, MlpNet, TrainConfig, TrainLog, TrainableNet};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Activation applied after a layer's affine map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Linear,
}

/// One dense layer: `out = act(W·x + b)` with `W` of shape (out_dim × in_dim).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerSpec {
    pub in_dim: usize,
    pub out_dim: usize,
    pub activation: Activation,
}

/// A full network architecture.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MlpSpec {
    pub layers: Vec<LayerSpec>,
}

impl MlpSpec {
    /// Layer stack from a dimension chain and per-layer activations.
    pub fn new(dims: &[usize], activations: &[Activation]) -> Self {
        assert!(dims.len() >= 2 && activations.len() == dims.len() - 1);
        let layers = dims
            .windows(2)
            .zip(activations)
            .map(|(w, &activation)| LayerSpec { in_dim: w[0], out_dim: w[1], activation })
            .collect();
        MlpSpec { layers }
    }

    /// The conventional stack: ReLU on every layer except a linear output.
    pub fn relu_stack(dims: &[usize]) -> Self {
        let mut acts = vec![Activation::Relu; dims.len() - 1];
        *acts.last_mut().unwrap() = Activation::Linear;
        MlpSpec::new(dims, &acts)
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::Config("network needs at least one layer".into()));
        }
        for pair in self.layers.windows(2) {
            if pair[0].out_dim != pair[1].in_dim {
                return Err(Error::Config(format!(
                    "layer dims do not chain: {} out vs {} in",
                    pair[0].out_dim, pair[1].in_dim
                )));
            }
        }
        if self.layers.iter().any(|l| l.in_dim == 0 || l.out_dim == 0) {
            return Err(Error::Config("zero-width layer".into()));
        }
        Ok(())
    }

    pub fn in_dim(&self) -> usize {
        self.layers.first().expect("nonempty spec").in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.layers.last().expect("nonempty spec").out_dim
    }
}

/// Weights for one layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerWeights {
    /// (out_dim × in_dim)
    pub w: Matrix,
    pub b: Vec<f64>,
}

/// All weights of a network; doubles as the gradient container (same shape).
#[derive(Debug, Clone, PartialEq)]
pub struct MlpWeights {
    pub layers: Vec<LayerWeights>,
}

impl MlpWeights {
    pub fn zeros_like(spec: &MlpSpec) -> Self {
        MlpWeights {
            layers: spec
                .layers
                .iter()
                .map(|l| LayerWeights { w: Matrix::zeros(l.out_dim, l.in_dim), b: vec![0.0; l.out_dim] })
                .collect(),
        }
    }

    pub fn n_params(&self) -> usize {
        self.layers.iter().map(|l| l.w.data.len() + l.b.len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.layers.iter().all(|l| l.w.is_finite() && l.b.iter().all(|v| v.is_finite()))
    }
}

/// Anything whose trainable scalars can be walked as flat tensors, in a
/// stable order. Lets the optimizer treat MLPs and composites uniformly.
pub trait ParamTensors {
    fn tensors(&self) -> Vec<&[f64]>;
    fn tensors_mut(&mut self) -> Vec<&mut [f64]>;
}

impl ParamTensors for MlpWeights {
    fn tensors(&self) -> Vec<&[f64]> {
        self.layers.iter().flat_map(|l| [l.w.data.as_slice(), l.b.as_slice()]).collect()
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        self.layers
            .iter_mut()
            .flat_map(|l| {
                let LayerWeights { w, b } = l;
                [w.data.as_mut_slice(), b.as_mut_slice()]
            })
            .collect()
    }
}

/// Architectures that report their trainable-parameter count.
pub trait WeightCount {
    fn weight_count(&self) -> usize;
}

impl WeightCount for MlpSpec {
    fn weight_count(&self) -> usize {
        self.layers.iter().map(|l| l.in_dim * l.out_dim + l.out_dim).sum()
    }
}

/// Total trainable scalars (weights + biases) of an architecture.
pub fn count_weights(spec: &impl WeightCount) -> usize {
    spec.weight_count()
}
