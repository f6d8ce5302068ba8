//! Experiment configuration: one flat TOML file per experiment.
//!
//! Every knob of a run lives in a single diffable key-value file. Only
//! `model` and `method` are mandatory; everything else has a desk-scale
//! default so a two-line config runs in minutes. [`ExperimentConfig::preset`]
//! bakes in the published per-model settings at either scale.

use penabc::models::default_series_len;
use penabc::presets::{mlp_spec_for, network_input_dim, SummaryMethod};
use penabc::{Error, ModelId, Result};
use serde::Deserialize;
use std::path::{Path, PathBuf};

/// Experiment sizing: quick desk runs or the published experiment sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Desk,
    Paper,
}

impl std::str::FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "desk" => Ok(Scale::Desk),
            "paper" => Ok(Scale::Paper),
            other => Err(Error::Config(format!("unknown scale '{other}' (expected desk or paper)"))),
        }
    }
}

/// Summary-statistic method named in a config file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Handpicked,
    MlpSmall,
    MlpLarge,
    MlpPre,
    Pen { d: usize },
}

impl Method {
    pub fn summary_method(&self) -> SummaryMethod {
        match *self {
            Method::Handpicked => SummaryMethod::Handpicked,
            Method::MlpSmall => SummaryMethod::MlpSmall,
            Method::MlpLarge => SummaryMethod::MlpLarge,
            Method::MlpPre => SummaryMethod::MlpPre,
            Method::Pen { d } => SummaryMethod::Pen { d },
        }
    }

    /// Identifier used in file names and CSV rows (`handpicked`, `mlp_small`,
    /// `pen2`, ...).
    pub fn label(&self) -> String {
        self.summary_method().label()
    }

    pub fn is_trained(&self) -> bool {
        !matches!(self, Method::Handpicked)
    }

    fn parse(name: &str, pen_d: Option<usize>) -> Result<Method> {
        let method = match name.trim().to_ascii_lowercase().as_str() {
            "handpicked" => Method::Handpicked,
            "mlp_small" => Method::MlpSmall,
            "mlp_large" => Method::MlpLarge,
            "mlp_pre" => Method::MlpPre,
            "pen" => {
                let d = pen_d.ok_or_else(|| {
                    Error::Config(
                        "method pen requires pen_d (published orders: gandk 0, alpha_stable 0, \
                         ar2 0 or 2, ma2 0 or 10)"
                            .into(),
                    )
                })?;
                return Ok(Method::Pen { d });
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown method '{other}' (expected handpicked, mlp_small, mlp_large, mlp_pre, or pen)"
                )))
            }
        };
        if pen_d.is_some() {
            return Err(Error::Config(format!(
                "pen_d is only meaningful for method pen, not {name}"
            )));
        }
        Ok(method)
    }
}

fn parse_model(name: &str) -> Result<ModelId> {
    ModelId::from_name(name.trim()).ok_or_else(|| {
        Error::Config(format!(
            "unknown model '{name}' (expected gandk, alpha_stable, ar2, or ma2)"
        ))
    })
}

/// A fully resolved experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelId,
    pub method: Method,
    /// Length M of each simulated series.
    pub series_len: usize,
    /// Training rows the network actually sees (a prefix of the pool).
    pub n_train: usize,
    /// Held-out rows scored for snapshot selection.
    pub n_eval: usize,
    /// Simulated pool sizes on disk; prefixes serve smaller `n_train`/`n_eval`
    /// so one pool covers a whole grid of training sizes.
    pub pool_train: usize,
    pub pool_eval: usize,
    /// Proposals in the ABC reference table.
    pub n_tilde: usize,
    /// Retention percentile (0.1 keeps the best 0.1% of proposals).
    pub percentile_x: f64,
    /// Independent observed data sets the inference is repeated over.
    pub repetitions: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Lattice resolution per axis for the exact 2-D reference posteriors.
    pub grid_resolution: usize,
    /// Chain length for the g-and-k reference posterior.
    pub mcmc_steps: usize,
    /// Worker threads for per-repetition fan-out; never hashed, never affects
    /// emitted numbers.
    pub threads: usize,
}

/// Epoch budget by training-set size: small sets are cheap per epoch, so give
/// them more passes.
pub fn epochs_for(n_train: usize) -> usize {
    if n_train <= 2_000 {
        80
    } else {
        40
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model: String,
    method: String,
    pen_d: Option<usize>,
    series_len: Option<usize>,
    n_train: Option<usize>,
    n_eval: Option<usize>,
    pool_train: Option<usize>,
    pool_eval: Option<usize>,
    n_tilde: Option<usize>,
    percentile_x: Option<f64>,
    repetitions: Option<usize>,
    seed: Option<u64>,
    output_dir: Option<String>,
    epochs: Option<usize>,
    batch_size: Option<usize>,
    learning_rate: Option<f64>,
    grid_resolution: Option<usize>,
    mcmc_steps: Option<usize>,
}

impl ExperimentConfig {
    /// Desk-scale baseline for a model/method pair; the starting point every
    /// other constructor and the TOML defaults build on.
    pub fn desk(model: ModelId, method: Method) -> ExperimentConfig {
        let n_train = 10_000;
        ExperimentConfig {
            model,
            method,
            series_len: default_series_len(model),
            n_train,
            n_eval: 1_000,
            pool_train: n_train,
            pool_eval: 1_000,
            n_tilde: 100_000,
            percentile_x: 0.1,
            repetitions: 10,
            seed: 1,
            output_dir: PathBuf::from(format!("runs/{}-{}", model.name(), method.label())),
            epochs: epochs_for(n_train),
            batch_size: 200,
            learning_rate: 1e-3,
            grid_resolution: 128,
            mcmc_steps: 25_000,
            threads: 1,
        }
    }

    /// Published (or desk-scaled) per-model settings: proposal counts,
    /// retention percentile, and evaluation-set sizes.
    pub fn preset(model: ModelId, method: Method, scale: Scale) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::desk(model, method);
        if scale == Scale::Paper {
            let iid = matches!(model, ModelId::Gandk | ModelId::AlphaStable);
            cfg.n_tilde = if iid { 100_000 } else { 500_000 };
            cfg.percentile_x = if iid { 0.1 } else { 0.02 };
            cfg.n_eval = match model {
                ModelId::Gandk | ModelId::AlphaStable => 5_000,
                ModelId::Ar2 => 10_000,
                ModelId::Ma2 => 500_000,
            };
            cfg.pool_eval = cfg.n_eval;
            cfg.repetitions = match model {
                ModelId::AlphaStable => 25,
                _ => 100,
            };
            cfg.grid_resolution = 256;
        }
        cfg
    }

    /// Parse a flat TOML config. Missing keys take the desk-scale defaults;
    /// unknown keys are rejected (they are always typos).
    pub fn from_toml_str(text: &str, origin: &str) -> Result<ExperimentConfig> {
        let raw: RawConfig = toml::from_str(text)
            .map_err(|e| Error::Config(format!("{origin}: {}", e.message())))?;
        let model = parse_model(&raw.model)?;
        let method = Method::parse(&raw.method, raw.pen_d)?;
        let mut cfg = ExperimentConfig::desk(model, method);
        if let Some(v) = raw.series_len {
            cfg.series_len = v;
        }
        if let Some(v) = raw.n_train {
            cfg.n_train = v;
            cfg.pool_train = v;
            cfg.epochs = epochs_for(v);
        }
        if let Some(v) = raw.n_eval {
            cfg.n_eval = v;
            cfg.pool_eval = v;
        }
        if let Some(v) = raw.pool_train {
            cfg.pool_train = v;
        }
        if let Some(v) = raw.pool_eval {
            cfg.pool_eval = v;
        }
        if let Some(v) = raw.n_tilde {
            cfg.n_tilde = v;
        }
        if let Some(v) = raw.percentile_x {
            cfg.percentile_x = v;
        }
        if let Some(v) = raw.repetitions {
            cfg.repetitions = v;
        }
        if let Some(v) = raw.seed {
            cfg.seed = v;
        }
        if let Some(v) = raw.output_dir {
            cfg.output_dir = PathBuf::from(v);
        }
        if let Some(v) = raw.epochs {
            cfg.epochs = v;
        }
        if let Some(v) = raw.batch_size {
            cfg.batch_size = v;
        }
        if let Some(v) = raw.learning_rate {
            cfg.learning_rate = v;
        }
        if let Some(v) = raw.grid_resolution {
            cfg.grid_resolution = v;
        }
        if let Some(v) = raw.mcmc_steps {
            cfg.mcmc_steps = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        ExperimentConfig::from_toml_str(&text, &path.display().to_string())
    }

    /// The flat-TOML echo of this config, written next to the outputs so a
    /// run documents itself.
    pub fn to_toml_string(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("model = \"{}\"\n", self.model.name()));
        match self.method {
            Method::Pen { d } => {
                s.push_str("method = \"pen\"\n");
                s.push_str(&format!("pen_d = {d}\n"));
            }
            _ => s.push_str(&format!("method = \"{}\"\n", self.method.label())),
        }
        s.push_str(&format!("series_len = {}\n", self.series_len));
        s.push_str(&format!("n_train = {}\n", self.n_train));
        s.push_str(&format!("n_eval = {}\n", self.n_eval));
        s.push_str(&format!("pool_train = {}\n", self.pool_train));
        s.push_str(&format!("pool_eval = {}\n", self.pool_eval));
        s.push_str(&format!("n_tilde = {}\n", self.n_tilde));
        s.push_str(&format!("percentile_x = {}\n", self.percentile_x));
        s.push_str(&format!("repetitions = {}\n", self.repetitions));
        s.push_str(&format!("seed = {}\n", self.seed));
        s.push_str(&format!("output_dir = \"{}\"\n", self.output_dir.display()));
        s.push_str(&format!("epochs = {}\n", self.epochs));
        s.push_str(&format!("batch_size = {}\n", self.batch_size));
        s.push_str(&format!("learning_rate = {}\n", self.learning_rate));
        s.push_str(&format!("grid_resolution = {}\n", self.grid_resolution));
        s.push_str(&format!("mcmc_steps = {}\n", self.mcmc_steps));
        s
    }

    /// Proposals retained by the percentile rule.
    pub fn retention_count(&self) -> usize {
        ((self.n_tilde as f64) * self.percentile_x / 100.0).floor() as usize
    }

    pub fn validate(&self) -> Result<()> {
        self.method.summary_method().validate_for(self.model)?;

        let positive: [(&str, usize); 7] = [
            ("series_len", self.series_len),
            ("n_train", self.n_train),
            ("n_eval", self.n_eval),
            ("n_tilde", self.n_tilde),
            ("repetitions", self.repetitions),
            ("epochs", self.epochs),
            ("batch_size", self.batch_size),
        ];
        for (name, value) in positive {
            if value == 0 {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        if self.pool_train < self.n_train {
            return Err(Error::Config(format!(
                "pool_train ({}) must cover n_train ({}): training reads a prefix of the pool",
                self.pool_train, self.n_train
            )));
        }
        if self.pool_eval < self.n_eval {
            return Err(Error::Config(format!(
                "pool_eval ({}) must cover n_eval ({})",
                self.pool_eval, self.n_eval
            )));
        }
        if !(self.percentile_x > 0.0 && self.percentile_x <= 100.0) {
            return Err(Error::Config(format!(
                "percentile_x must lie in (0, 100], got {}",
                self.percentile_x
            )));
        }
        if self.retention_count() == 0 {
            return Err(Error::Config(format!(
                "percentile_x = {} of n_tilde = {} retains zero proposals; raise one of them",
                self.percentile_x, self.n_tilde
            )));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "learning_rate must be positive and finite, got {}",
                self.learning_rate
            )));
        }
        if self.grid_resolution < 2 {
            return Err(Error::Config("grid_resolution must be at least 2".into()));
        }
        if self.mcmc_steps < 1_000 {
            return Err(Error::Config(
                "mcmc_steps must be at least 1000 for a usable reference chain".into(),
            ));
        }

        // Shape constraints the published architectures impose on M.
        let sm = self.method.summary_method();
        match self.method {
            Method::MlpSmall | Method::MlpLarge => {
                let expected = mlp_spec_for(self.model, sm)?.in_dim();
                let got = network_input_dim(self.model, sm, self.series_len)?;
                if got != expected {
                    return Err(Error::Config(format!(
                        "method {} for {} has a published input layer of width {expected}, \
                         but series_len = {} produces inputs of width {got}",
                        self.method.label(),
                        self.model.name(),
                        self.series_len
                    )));
                }
            }
            Method::Pen { d } => {
                if self.series_len <= d {
                    return Err(Error::Config(format!(
                        "series_len ({}) must exceed pen_d ({d}): the network needs at least \
                         one window of d+1 values",
                        self.series_len
                    )));
                }
            }
            Method::Handpicked => {
                let min_len = match self.model {
                    ModelId::Gandk | ModelId::AlphaStable => 1,
                    ModelId::Ar2 => 6,
                    ModelId::Ma2 => 3,
                };
                if self.series_len < min_len {
                    return Err(Error::Config(format!(
                        "handpicked summaries for {} need series_len >= {min_len}, got {}",
                        self.model.name(),
                        self.series_len
                    )));
                }
            }
            Method::MlpPre => {}
        }
        Ok(())
    }
}
