//! Published network architectures and the per-model input pipelines.
//!
//! Each benchmark ships four summary networks — MLP small, MLP large, an MLP
//! on ECDF features ("MLP pre", i.i.d. models only), and a PEN — whose layer
//! tables are frozen here, together with what every method feeds its network:
//!
//! | model     | MLP small/large input        | MLP pre input | PEN input (series; extras) |
//! |-----------|------------------------------|---------------|----------------------------|
//! | g-and-k   | cleaned series (1000)        | ECDF (100)    | cleaned; none              |
//! | α-stable  | scaled series + Q₁,Q₃ (1002) | ECDF (100)    | scaled; (Q₁,Q₃)            |
//! | AR(2)     | raw series (100)             | —             | raw; none                  |
//! | MA(2)     | raw series (100)             | —             | raw; none                  |
//!
//! Cleaning replaces out-of-range values with uniform draws from the in-range
//! span; the draws are seeded from the series content so the pipeline stays a
//! pure function of the data. ECDF features are computed on cleaned, unscaled
//! values over the model's fixed grid.

use crate::error::{Error, Result};
use crate::models::{clean_outliers, ecdf_features, handpicked_summaries, robust_scale, PreprocessSpec};
use crate::neuralnet::{Activation, MlpSpec};
use crate::pen::PenSpec;
use crate::rng::{content_seed, SeedTree};
use crate::{ModelId, Series};

/// The five summary-statistic methods compared on every benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SummaryMethod {
    Handpicked,
    MlpSmall,
    MlpLarge,
    /// MLP on ECDF features; meaningful only for i.i.d. models.
    MlpPre,
    Pen { d: usize },
}

impl SummaryMethod {
    /// Stable identifier used in file names and result CSV keys.
    pub fn label(&self) -> String {
        match self {
            SummaryMethod::Handpicked => "handpicked".into(),
            SummaryMethod::MlpSmall => "mlp_small".into(),
            SummaryMethod::MlpLarge => "mlp_large".into(),
            SummaryMethod::MlpPre => "mlp_pre".into(),
            SummaryMethod::Pen { d } => format!("pen{d}"),
        }
    }

    /// Reject combinations that have no defined pipeline: ECDF features are
    /// meaningless for time-series models, and PEN orders are limited to the
    /// published architectures.
    pub fn validate_for(&self, model: ModelId) -> Result<()> {
        match self {
            SummaryMethod::MlpPre if matches!(model, ModelId::Ar2 | ModelId::Ma2) => Err(Error::Config(format!(
                "method mlp_pre applies only to i.i.d. models (gandk, alpha_stable): \
                 an empirical distribution function discards the time ordering of {}",
                model.name()
            ))),
            SummaryMethod::Pen { d } => {
                pen_spec(model, *d)?;
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// The small MLP regressor for a model (raw/cleaned series input).
pub fn mlp_small(model: ModelId) -> MlpSpec {
    match model {
        ModelId::Gandk => MlpSpec::relu_stack(&[1000, 25, 25, 12, 4]),
        ModelId::AlphaStable => MlpSpec::relu_stack(&[1002, 25, 25, 12, 4]),
        ModelId::Ar2 => MlpSpec::relu_stack(&[100, 55, 55, 25, 2]),
        ModelId::Ma2 => MlpSpec::relu_stack(&[100, 60, 60, 25, 2]),
    }
}

/// The large MLP regressor for a model.
pub fn mlp_large(model: ModelId) -> MlpSpec {
    match model {
        ModelId::Gandk => MlpSpec::relu_stack(&[1000, 100, 100, 50, 4]),
        ModelId::AlphaStable => MlpSpec::relu_stack(&[1002, 100, 100, 50, 4]),
        ModelId::Ar2 | ModelId::Ma2 => MlpSpec::relu_stack(&[100, 100, 100, 50, 2]),
    }
}

/// The MLP on 100 ECDF features (g-and-k and α-stable only).
pub fn mlp_pre(model: ModelId) -> Result<MlpSpec> {
    SummaryMethod::MlpPre.validate_for(model)?;
    Ok(MlpSpec::relu_stack(&[100, 100, 100, 50, model.param_dim()]))
}

/// The published PEN architecture for `(model, d)`.
///
/// The MA(2) inner networks end in ReLU rather than linear, as published;
/// all other stacks end linear.
pub fn pen_spec(model: ModelId, d: usize) -> Result<PenSpec> {
    let spec = match (model, d) {
        (ModelId::Gandk, 0) => PenSpec {
            d: 0,
            inner: MlpSpec::relu_stack(&[1, 100, 50, 10]),
            outer: MlpSpec::relu_stack(&[10, 100, 100, 50, 4]),
            extra_dim: 0,
        },
        (ModelId::AlphaStable, 0) => PenSpec {
            d: 0,
            inner: MlpSpec::relu_stack(&[1, 100, 50, 20]),
            outer: MlpSpec::relu_stack(&[22, 100, 100, 50, 4]),
            extra_dim: 2,
        },
        (ModelId::Ar2, 0) => PenSpec {
            d: 0,
            inner: MlpSpec::relu_stack(&[1, 100, 50, 10]),
            outer: MlpSpec::relu_stack(&[10, 50, 50, 20, 2]),
            extra_dim: 0,
        },
        (ModelId::Ar2, 2) => PenSpec {
            d: 2,
            inner: MlpSpec::relu_stack(&[3, 100, 50, 10]),
            outer: MlpSpec::relu_stack(&[12, 50, 50, 20, 2]),
            extra_dim: 0,
        },
        (ModelId::Ma2, 0) => PenSpec {
            d: 0,
            inner: MlpSpec::new(&[1, 100, 50, 10], &[Activation::Relu; 3]),
            outer: MlpSpec::relu_stack(&[10, 50, 50, 20, 2]),
            extra_dim: 0,
        },
        (ModelId::Ma2, 10) => PenSpec {
            d: 10,
            inner: MlpSpec::new(&[11, 100, 50, 10], &[Activation::Relu; 3]),
            outer: MlpSpec::relu_stack(&[20, 50, 50, 20, 2]),
            extra_dim: 0,
        },
        _ => {
            return Err(Error::Config(format!(
                "no published PEN architecture for model {} with d = {d} \
                 (available: gandk d=0, alpha_stable d=0, ar2 d∈{{0,2}}, ma2 d∈{{0,10}})",
                model.name()
            )))
        }
    };
    debug_assert!(spec.validate().is_ok());
    Ok(spec)
}

/// The named built-in PEN configurations.
pub const PEN_PRESETS: [(&str, ModelId, usize); 6] = [
    ("gk-pen0", ModelId::Gandk, 0),
    ("alpha-pen0", ModelId::AlphaStable, 0),
    ("ar2-pen0", ModelId::Ar2, 0),
    ("ar2-pen2", ModelId::Ar2, 2),
    ("ma2-pen0", ModelId::Ma2, 0),
    ("ma2-pen10", ModelId::Ma2, 10),
];

/// Look up a named PEN preset such as `"ar2-pen2"`.
pub fn pen_preset(name: &str) -> Option<(ModelId, PenSpec)> {
    let (_, model, d) = PEN_PRESETS.iter().find(|(n, _, _)| *n == name)?;
    Some((*model, pen_spec(*model, *d).expect("presets are published architectures")))
}

/// The MLP spec a method uses, if it is an MLP method.
pub fn mlp_spec_for(model: ModelId, method: SummaryMethod) -> Result<MlpSpec> {
    match method {
        SummaryMethod::MlpSmall => Ok(mlp_small(model)),
        SummaryMethod::MlpLarge => Ok(mlp_large(model)),
        SummaryMethod::MlpPre => mlp_pre(model),
        _ => Err(Error::Config(format!("method {} has no MLP architecture", method.label()))),
    }
}

/// What a summary network consumes for one series: the (possibly
/// preprocessed) series and extra side features. MLPs read the flattened
/// concatenation; PENs read the two parts separately.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkInput {
    pub series: Series,
    pub extras: Vec<f64>,
}

impl NetworkInput {
    pub fn flat(&self) -> Vec<f64> {
        let mut v = self.series.clone();
        v.extend_from_slice(&self.extras);
        v
    }

    pub fn dim(&self) -> usize {
        self.series.len() + self.extras.len()
    }
}

/// Replacement draws for outlier cleaning are seeded from the series content,
/// so cleaning is a deterministic pure function of the data.
fn clean_for(spec: &PreprocessSpec, y: &[f64]) -> Result<Series> {
    let mut rng = SeedTree::new(content_seed(y)).child("clean-outliers").rng();
    clean_outliers(y, spec.clean_lo, spec.clean_hi, &mut rng)
}

/// Build the network input for a `(model, method)` pair from a raw series.
pub fn network_input(model: ModelId, method: SummaryMethod, y: &[f64]) -> Result<NetworkInput> {
    method.validate_for(model)?;
    match model {
        ModelId::Ar2 | ModelId::Ma2 => Ok(NetworkInput { series: y.to_vec(), extras: vec![] }),
        ModelId::Gandk => {
            let spec = PreprocessSpec::gandk();
            let cleaned = clean_for(&spec, y)?;
            let series = match method {
                SummaryMethod::MlpPre => ecdf_features(&cleaned, &spec.ecdf_grid),
                _ => cleaned,
            };
            Ok(NetworkInput { series, extras: vec![] })
        }
        ModelId::AlphaStable => {
            let spec = PreprocessSpec::alpha_stable();
            let cleaned = clean_for(&spec, y)?;
            match method {
                SummaryMethod::MlpPre => {
                    Ok(NetworkInput { series: ecdf_features(&cleaned, &spec.ecdf_grid), extras: vec![] })
                }
                _ => {
                    let (scaled, q1, q3) = robust_scale(&cleaned)?;
                    Ok(NetworkInput { series: scaled, extras: vec![q1, q3] })
                }
            }
        }
    }
}

/// Input dimension of the flattened network input for a series of length `m`.
pub fn network_input_dim(model: ModelId, method: SummaryMethod, m: usize) -> Result<usize> {
    method.validate_for(model)?;
    Ok(match (model, method) {
        (_, SummaryMethod::MlpPre) => 100,
        (ModelId::AlphaStable, _) => m + 2,
        _ => m,
    })
}

/// Length of the summary vector a method produces for a model.
pub fn summary_dim(model: ModelId, method: SummaryMethod) -> usize {
    match method {
        SummaryMethod::Handpicked => handpicked_len(model),
        _ => model.param_dim(),
    }
}

fn handpicked_len(model: ModelId) -> usize {
    match model {
        ModelId::Gandk | ModelId::AlphaStable | ModelId::Ar2 => 5,
        ModelId::Ma2 => 2,
    }
}

/// Distance-metric weights (diagonal of A) per summary component: identity
/// everywhere except the handpicked g-and-k statistics, which use the fixed
/// weight vector w with diagonal 1/w².
pub fn metric_weights(model: ModelId, method: SummaryMethod) -> Vec<f64> {
    if model == ModelId::Gandk && method == SummaryMethod::Handpicked {
        GANDK_HANDPICKED_W.iter().map(|w| 1.0 / (w * w)).collect()
    } else {
        vec![1.0; summary_dim(model, method)]
    }
}

/// Per-statistic scales for the handpicked g-and-k distance.
pub const GANDK_HANDPICKED_W: [f64; 5] = [0.22, 0.19, 0.53, 2.97, 1.90];

/// Summary statistics for a raw series under any method, given trained
/// weights for the network methods.
pub fn summarize_series(
    model: ModelId,
    method: SummaryMethod,
    net: Option<&TrainedNet>,
    y: &[f64],
) -> Result<Vec<f64>> {
    match method {
        SummaryMethod::Handpicked => handpicked_summaries(model, y),
        _ => {
            let net = net.ok_or_else(|| {
                Error::Config(format!("method {} needs trained network weights", method.label()))
            })?;
            net.summarize(model, method, y)
        }
    }
}

/// Trained weights for a network summary method.
#[derive(Debug, Clone)]
pub enum TrainedNet {
    Mlp { spec: MlpSpec, weights: crate::neuralnet::MlpWeights },
    Pen { spec: PenSpec, weights: crate::pen::PenWeights },
}

impl TrainedNet {
    pub fn summarize(&self, model: ModelId, method: SummaryMethod, y: &[f64]) -> Result<Vec<f64>> {
        let input = network_input(model, method, y)?;
        match self {
            TrainedNet::Mlp { spec, weights } => {
                let flat = input.flat();
                if flat.len() != spec.in_dim() {
                    return Err(Error::DimMismatch(format!(
                        "network expects {} inputs, series produced {}",
                        spec.in_dim(),
                        flat.len()
                    )));
                }
                Ok(crate::neuralnet::forward(spec, weights, &flat).0)
            }
            TrainedNet::Pen { spec, weights } => {
                crate::pen::pen_predict(spec, weights, &input.series, &input.extras, crate::pen::PoolOrder::Stream)
            }
        }
    }
}
