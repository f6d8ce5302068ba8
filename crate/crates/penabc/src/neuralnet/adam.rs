//! Adam with the standard constants: β₁ = 0.9, β₂ = 0.999, ε = 1e-8, and
//! bias-corrected moment estimates.

use crate::neuralnet::ParamTensors;

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const EPS: f64 = 1e-8;

/// First/second-moment accumulators, one pair of buffers per tensor.
#[derive(Debug, Clone)]
pub struct AdamState {
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
    t: u64,
}

impl AdamState {
    pub fn new_like(params: &impl ParamTensors) -> Self {
        let shapes: Vec<usize> = params.tensors().iter().map(|t| t.len()).collect();
        AdamState {
            m: shapes.iter().map(|&n| vec![0.0; n]).collect(),
            v: shapes.iter().map(|&n| vec![0.0; n]).collect(),
            t: 0,
        }
    }

    pub fn steps_taken(&self) -> u64 {
        self.t
    }
}

/// One Adam update of `params` along `grads`.
pub fn adam_step<P: ParamTensors>(params: &mut P, grads: &P, state: &mut AdamState, lr: f64) {
    state.t += 1;
    let t = state.t as i32;
    let corr1 = 1.0 - BETA1.powi(t);
    let corr2 = 1.0 - BETA2.powi(t);
    let g_tensors = grads.tensors();
    let p_tensors = params.tensors_mut();
    assert_eq!(g_tensors.len(), p_tensors.len(), "gradient/parameter tensor count mismatch");
    assert_eq!(g_tensors.len(), state.m.len(), "optimizer state does not match parameters");
    for (((p, g), m), v) in p_tensors.into_iter().zip(g_tensors).zip(&mut state.m).zip(&mut state.v) {
        assert_eq!(p.len(), g.len());
        for i in 0..p.len() {
            m[i] = BETA1 * m[i] + (1.0 - BETA1) * g[i];
            v[i] = BETA2 * v[i] + (1.0 - BETA2) * g[i] * g[i];
            let m_hat = m[i] / corr1;
            let v_hat = v[i] / corr2;
            p[i] -= lr * m_hat / (v_hat.sqrt() + EPS);
        }
    }
}
