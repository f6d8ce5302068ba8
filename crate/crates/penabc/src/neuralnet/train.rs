//! The training loop: minibatch Adam on mean squared error, with the
//! "train every epoch, keep the snapshot with the lowest evaluation error"
//! selection rule. Nothing halts early — the returned weights are the argmin
//! over epoch-end snapshots (first epoch wins ties).

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::neuralnet::mlp::check_finite_loss;
use crate::neuralnet::{adam_step, backward_batch, forward_batch, forward_batch_nocache, mse_loss, mse_loss_grad, AdamState, MlpSpec, MlpWeights, ParamTensors};
use crate::rng::rng_from_seed;
use rand::seq::SliceRandom;

/// Training hyperparameters. `n_train`/`n_eval` select prefixes of the
/// provided datasets, so one large simulated set can serve a whole grid of
/// training sizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub n_train: usize,
    pub n_eval: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_train == 0 || self.n_eval == 0 || self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::Config("training counts must be positive".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::Config("learning rate must be positive".into()));
        }
        Ok(())
    }
}

/// Input rows paired with regression targets.
#[derive(Debug, Clone)]
pub struct Dataset {
    /// (n × input_len)
    pub x: Matrix,
    /// (n × target_dim)
    pub t: Matrix,
}

impl Dataset {
    pub fn new(x: Matrix, t: Matrix) -> Self {
        assert_eq!(x.rows, t.rows, "inputs and targets must align");
        Dataset { x, t }
    }

    pub fn len(&self) -> usize {
        self.x.rows
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn gather(&self, idx: &[usize]) -> (Matrix, Matrix) {
        let mut x = Matrix::zeros(idx.len(), self.x.cols);
        let mut t = Matrix::zeros(idx.len(), self.t.cols);
        for (r, &i) in idx.iter().enumerate() {
            x.row_mut(r).copy_from_slice(self.x.row(i));
            t.row_mut(r).copy_from_slice(self.t.row(i));
        }
        (x, t)
    }
}

/// A regression network the trainer can drive: batch loss/gradients and
/// batch prediction. Implemented by plain MLPs and by the composite
/// architecture in [`crate::pen`].
pub trait TrainableNet {
    type Weights: Clone + ParamTensors;

    fn loss_and_grads(&self, w: &Self::Weights, x: &Matrix, targets: &Matrix) -> (f64, Self::Weights);
    fn predict(&self, w: &Self::Weights, x: &Matrix) -> Matrix;
}

/// A plain MLP viewed as a trainable regressor on flat input rows.
#[derive(Debug, Clone)]
pub struct MlpNet {
    pub spec: MlpSpec,
}

impl TrainableNet for MlpNet {
    type Weights = MlpWeights;

    fn loss_and_grads(&self, w: &MlpWeights, x: &Matrix, targets: &Matrix) -> (f64, MlpWeights) {
        let cache = forward_batch(&self.spec, w, x);
        let (loss, grad_pred) = mse_loss_grad(cache.output(), targets);
        let (grads, _) = backward_batch(&self.spec, w, &cache, &grad_pred);
        (loss, grads)
    }

    fn predict(&self, w: &MlpWeights, x: &Matrix) -> Matrix {
        forward_batch_nocache(&self.spec, w, x)
    }
}

/// Per-epoch record written to the training log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochLog {
    pub train_mse: f64,
    pub eval_mse: f64,
}

#[derive(Debug, Clone)]
pub struct TrainLog {
    pub epochs: Vec<EpochLog>,
    /// Index (0-based) of the snapshot that was returned.
    pub best_epoch: usize,
}

/// First index of the minimum — the snapshot-selection rule.
pub fn best_epoch(eval_mses: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in eval_mses.iter().enumerate() {
        if v < eval_mses[best] {
            best = i;
        }
    }
    best
}

fn eval_mse_chunked<N: TrainableNet>(net: &N, w: &N::Weights, data: &Dataset, n: usize, chunk: usize) -> f64 {
    let mut sq_sum = 0.0;
    let mut start = 0;
    while start < n {
        let rows = chunk.min(n - start);
        let idx: Vec<usize> = (start..start + rows).collect();
        let (x, t) = data.gather(&idx);
        let pred = net.predict(w, &x);
        sq_sum += mse_loss(&pred, &t) * rows as f64;
        start += rows;
    }
    sq_sum / n as f64
}

/// Train and return the best epoch-end snapshot plus the full loss log.
pub fn train<N: TrainableNet>(
    net: &N,
    init: N::Weights,
    train_data: &Dataset,
    eval_data: &Dataset,
    cfg: &TrainConfig,
) -> Result<(N::Weights, TrainLog)> {
    cfg.validate()?;
    if train_data.is_empty() || eval_data.is_empty() {
        return Err(Error::Config("train and eval sets must be nonempty".into()));
    }
    if cfg.n_train > train_data.len() || cfg.n_eval > eval_data.len() {
        return Err(Error::Config(format!(
            "requested {}/{} rows but datasets hold {}/{}",
            cfg.n_train,
            cfg.n_eval,
            train_data.len(),
            eval_data.len()
        )));
    }

    let mut rng = rng_from_seed(cfg.seed);
    let mut weights = init;
    let mut state = AdamState::new_like(&weights);
    let mut indices: Vec<usize> = (0..cfg.n_train).collect();
    let mut log = Vec::with_capacity(cfg.epochs);
    let mut best: Option<(f64, N::Weights)> = None;

    for epoch in 0..cfg.epochs {
        indices.shuffle(&mut rng);
        let mut train_sq = 0.0;
        for (batch_no, batch_idx) in indices.chunks(cfg.batch_size).enumerate() {
            let (x, t) = train_data.gather(batch_idx);
            let (loss, grads) = net.loss_and_grads(&weights, &x, &t);
            check_finite_loss(loss, epoch, batch_no)?;
            train_sq += loss * batch_idx.len() as f64;
            adam_step(&mut weights, &grads, &mut state, cfg.learning_rate);
        }
        let eval_mse = eval_mse_chunked(net, &weights, eval_data, cfg.n_eval, cfg.batch_size);
        check_finite_loss(eval_mse, epoch, usize::MAX)?;
        log.push(EpochLog { train_mse: train_sq / cfg.n_train as f64, eval_mse });
        let better = best.as_ref().map_or(true, |(b, _)| eval_mse < *b);
        if better {
            best = Some((eval_mse, weights.clone()));
        }
    }

    let evals: Vec<f64> = log.iter().map(|e| e.eval_mse).collect();
    let best_idx = best_epoch(&evals);
    let (_, best_weights) = best.expect("at least one epoch ran");
    Ok((best_weights, TrainLog { epochs: log, best_epoch: best_idx }))
}
