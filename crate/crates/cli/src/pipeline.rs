//! The four experiment stages — simulate, train, abc, evaluate — plus the
//! bookkeeping that makes them resumable and reproducible.
//!
//! Every stage derives a content hash from the settings that determine its
//! outputs and records it in `manifests/`. Rerunning a completed stage with
//! the same configuration is a no-op; changing any relevant knob invalidates
//! the manifest (and, through descriptor chaining, every stage downstream of
//! it). Model-level artifacts (observed data, reference table, training
//! pools, reference posteriors) are shared by all methods; the trained
//! network, ABC posteriors, and metric rows are per *cell* — a method at a
//! training size, e.g. `pen2_n10000`.
//!
//! All randomness flows from the single config seed through labeled
//! [`SeedTree`] children, with per-repetition streams indexed by repetition
//! number, so results do not depend on execution order or thread count.

use crate::config::{ExperimentConfig, Method};
use penabc::abc::{build_reference_table, rejection_sample, summarize_table, PosteriorSample, ReferenceTable};
use penabc::io::{
    append_result_rows, load_trained_net, read_posterior_csv, read_reference_table, read_result_rows,
    read_series_bin, save_trained_net, write_posterior_csv, write_reference_table, write_series_bin,
    ResultRow,
};
use penabc::linalg::Matrix;
use penabc::models::{ground_truth, ground_truth_natural, simulate, PriorSpec};
use penabc::neuralnet::{init_weights, train, Dataset, MlpNet, TrainConfig, TrainLog};
use penabc::pen::{init_pen_weights, PenNet};
use penabc::presets::{metric_weights, mlp_spec_for, network_input, pen_spec, summarize_series, TrainedNet};
use penabc::reference::{
    ar2_loglik, gandk_log_posterior, grid_posterior, ma2_loglik, rw_metropolis, sample_grid, thin_chain,
    LogDensity,
};
use penabc::rng::{hash_bytes, SeedTree};
use penabc::{Error, ModelId, Result, Series};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

/// Where an experiment keeps its artifacts, all under one root directory.
#[derive(Debug, Clone)]
pub struct Paths {
    pub root: PathBuf,
}

impl Paths {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Paths { root: root.into() }
    }

    pub fn observed(&self) -> PathBuf {
        self.root.join("data/observed.bin")
    }

    pub fn table_dir(&self) -> PathBuf {
        self.root.join("data/table")
    }

    pub fn train_dir(&self) -> PathBuf {
        self.root.join("data/train")
    }

    pub fn eval_dir(&self) -> PathBuf {
        self.root.join("data/eval")
    }

    pub fn manifest(&self, stage: &str) -> PathBuf {
        self.root.join(format!("manifests/{stage}.hash"))
    }

    pub fn config_echo(&self, cell: &str) -> PathBuf {
        self.root.join(format!("configs/{cell}.toml"))
    }

    pub fn net_weights(&self, cell: &str) -> PathBuf {
        self.root.join(format!("nets/{cell}.weights"))
    }

    pub fn train_log(&self, cell: &str) -> PathBuf {
        self.root.join(format!("nets/{cell}_log.csv"))
    }

    pub fn posterior_csv(&self, cell: &str, rep: usize) -> PathBuf {
        self.root.join(format!("posteriors/{cell}/rep_{rep}.csv"))
    }

    pub fn reference_csv(&self, rep: usize) -> PathBuf {
        self.root.join(format!("reference/rep_{rep}.csv"))
    }

    pub fn results_csv(&self) -> PathBuf {
        self.root.join("results.csv")
    }

    pub fn summary_csv(&self) -> PathBuf {
        self.root.join("summary.csv")
    }
}

/// The per-method/per-size artifact key. Handpicked summaries involve no
/// training, so all training sizes share one cell.
pub fn cell_name(cfg: &ExperimentConfig) -> String {
    if cfg.method.is_trained() {
        format!("{}_n{}", cfg.method.label(), cfg.n_train)
    } else {
        cfg.method.label()
    }
}

/// Training size recorded in result rows; handpicked rows use 0 ("not
/// applicable").
pub fn effective_n_train(cfg: &ExperimentConfig) -> usize {
    if cfg.method.is_trained() {
        cfg.n_train
    } else {
        0
    }
}

// -------------------------------------------------------------------------
// Manifests

fn simulate_descriptor(cfg: &ExperimentConfig) -> String {
    format!(
        "simulate v1|model={}|seed={}|m={}|reps={}|n_tilde={}|pool_train={}|pool_eval={}",
        cfg.model.name(),
        cfg.seed,
        cfg.series_len,
        cfg.repetitions,
        cfg.n_tilde,
        cfg.pool_train,
        cfg.pool_eval
    )
}

fn train_descriptor(cfg: &ExperimentConfig) -> String {
    format!(
        "train v1|{}|cell={}|n_train={}|n_eval={}|epochs={}|batch={}|lr={:016x}",
        simulate_descriptor(cfg),
        cell_name(cfg),
        cfg.n_train,
        cfg.n_eval,
        cfg.epochs,
        cfg.batch_size,
        cfg.learning_rate.to_bits()
    )
}

fn abc_descriptor(cfg: &ExperimentConfig) -> String {
    let upstream = if cfg.method.is_trained() {
        train_descriptor(cfg)
    } else {
        simulate_descriptor(cfg)
    };
    format!("abc v1|{upstream}|x={:016x}", cfg.percentile_x.to_bits())
}

fn evaluate_descriptor(cfg: &ExperimentConfig) -> String {
    let reference_knob = match cfg.model {
        ModelId::Ar2 | ModelId::Ma2 => format!("grid={}", cfg.grid_resolution),
        ModelId::Gandk => format!("mcmc={}", cfg.mcmc_steps),
        ModelId::AlphaStable => "rmse".into(),
    };
    format!("evaluate v1|{}|{reference_knob}", abc_descriptor(cfg))
}

fn stage_hash(descriptor: &str) -> String {
    format!("{:016x}", hash_bytes(descriptor.as_bytes()))
}

fn manifest_matches(path: &Path, hash: &str) -> bool {
    std::fs::read_to_string(path).map(|s| s.trim() == hash).unwrap_or(false)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    ensure_parent(path)?;
    std::fs::write(path, text).map_err(|e| io_error(path, e))
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| io_error(parent, e))?;
    }
    Ok(())
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.display().to_string(), source }
}

/// A precondition failure that is about missing state, not a bad config:
/// surfaces as an I/O error so it exits with the runtime code.
fn missing_stage(path: &Path, advice: &str) -> Error {
    io_error(path, std::io::Error::new(std::io::ErrorKind::NotFound, advice.to_string()))
}

fn record_config(cfg: &ExperimentConfig, paths: &Paths) -> Result<()> {
    write_text(&paths.config_echo(&cell_name(cfg)), &cfg.to_toml_string())
}

// -------------------------------------------------------------------------
// Parallel fan-out

/// Run `f(0..n)` on up to `threads` workers and return results in index
/// order. Work items must derive their randomness from their index, so the
/// output is identical for every thread count.
pub fn parallel_map<T, F>(threads: usize, n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    let workers = threads.max(1).min(n.max(1));
    if workers == 1 {
        return (0..n).map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let mut per_worker: Vec<Vec<(usize, Result<T>)>> = Vec::with_capacity(workers);
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                scope.spawn(|| {
                    let mut mine = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        if i >= n {
                            break;
                        }
                        mine.push((i, f(i)));
                    }
                    mine
                })
            })
            .collect();
        for handle in handles {
            per_worker.push(handle.join().expect("worker thread panicked"));
        }
    });
    let mut slots: Vec<Option<Result<T>>> = (0..n).map(|_| None).collect();
    for (i, r) in per_worker.into_iter().flatten() {
        slots[i] = Some(r);
    }
    slots.into_iter().map(|s| s.expect("every index visited exactly once")).collect()
}

// -------------------------------------------------------------------------
// Stage 1: simulate

/// Write the observed data sets, the ABC reference table, and the training
/// and evaluation pools. No-op when already done with the same settings.
pub fn cmd_simulate(cfg: &ExperimentConfig) -> Result<()> {
    cfg.validate()?;
    let paths = Paths::new(&cfg.output_dir);
    record_config(cfg, &paths)?;
    let hash = stage_hash(&simulate_descriptor(cfg));
    let outputs_exist = [
        paths.observed(),
        paths.table_dir().join("params.bin"),
        paths.train_dir().join("params.bin"),
        paths.eval_dir().join("params.bin"),
    ]
    .iter()
    .all(|p| p.exists());
    if outputs_exist && manifest_matches(&paths.manifest("simulate"), &hash) {
        return Ok(());
    }

    let tree = SeedTree::new(cfg.seed);
    let truth = ground_truth(cfg.model);
    let prior = PriorSpec::new(cfg.model);

    let observed_tree = tree.child("observed");
    let observed = parallel_map(cfg.threads, cfg.repetitions, |r| {
        simulate(&truth, cfg.series_len, &mut observed_tree.index_rng(r as u64))
    })?;
    ensure_parent(&paths.observed())?;
    write_series_bin(paths.observed(), &observed)?;
    drop(observed);

    let table = build_reference_table(cfg.model, &prior, cfg.series_len, cfg.n_tilde, &mut tree.child("table").rng())?;
    ensure_dir(&paths.table_dir())?;
    write_reference_table(paths.table_dir(), &table)?;
    drop(table);

    let pool = build_reference_table(
        cfg.model,
        &prior,
        cfg.series_len,
        cfg.pool_train,
        &mut tree.child("train-pool").rng(),
    )?;
    ensure_dir(&paths.train_dir())?;
    write_reference_table(paths.train_dir(), &pool)?;
    drop(pool);

    let eval_pool = build_reference_table(
        cfg.model,
        &prior,
        cfg.series_len,
        cfg.pool_eval,
        &mut tree.child("eval-pool").rng(),
    )?;
    ensure_dir(&paths.eval_dir())?;
    write_reference_table(paths.eval_dir(), &eval_pool)?;

    write_text(&paths.manifest("simulate"), &hash)
}

fn require_stage(paths: &Paths, stage: &str, hash: &str, advice_missing: &str, advice_stale: &str) -> Result<()> {
    let manifest = paths.manifest(stage);
    if !manifest.exists() {
        return Err(missing_stage(&manifest, advice_missing));
    }
    if !manifest_matches(&manifest, hash) {
        return Err(missing_stage(&manifest, advice_stale));
    }
    Ok(())
}

fn require_simulated(cfg: &ExperimentConfig, paths: &Paths) -> Result<()> {
    require_stage(
        paths,
        "simulate",
        &stage_hash(&simulate_descriptor(cfg)),
        "no simulated data here; run `penabc simulate` first",
        "simulated data was produced under different settings; rerun `penabc simulate`",
    )
}

fn require_trained(cfg: &ExperimentConfig, paths: &Paths, cell: &str) -> Result<()> {
    if !cfg.method.is_trained() {
        return Ok(());
    }
    require_stage(
        paths,
        &format!("train-{cell}"),
        &stage_hash(&train_descriptor(cfg)),
        "no trained network here; run `penabc train` first",
        "network weights were trained under different settings; rerun `penabc train`",
    )
}

fn require_abc(cfg: &ExperimentConfig, paths: &Paths, cell: &str) -> Result<()> {
    require_stage(
        paths,
        &format!("abc-{cell}"),
        &stage_hash(&abc_descriptor(cfg)),
        "no ABC posteriors here; run `penabc abc` first",
        "ABC posteriors were produced under different settings; rerun `penabc abc`",
    )
}

// -------------------------------------------------------------------------
// Stage 2: train

/// Targets are the table's parameter draws; inputs are the per-method
/// network inputs, flattened. Reads a `rows` prefix so one pool serves every
/// training size.
fn build_dataset(cfg: &ExperimentConfig, table: &ReferenceTable, rows: usize, what: &str) -> Result<Dataset> {
    if table.params.len() < rows {
        return Err(Error::Config(format!(
            "{what} pool holds {} rows but {rows} are requested; rerun `penabc simulate`",
            table.params.len()
        )));
    }
    let sm = cfg.method.summary_method();
    let mut width = None;
    let mut x_data = Vec::new();
    for y in table.series.iter().take(rows) {
        let flat = network_input(cfg.model, sm, y)?.flat();
        let w = *width.get_or_insert(flat.len());
        if flat.len() != w {
            return Err(Error::DimMismatch(format!(
                "network inputs vary in width ({} vs {w}) across the {what} pool",
                flat.len()
            )));
        }
        x_data.extend_from_slice(&flat);
    }
    let cols = width.unwrap_or(0);
    let p = cfg.model.param_dim();
    let mut t_data = Vec::with_capacity(rows * p);
    for theta in table.params.iter().take(rows) {
        t_data.extend_from_slice(&theta.values);
    }
    Ok(Dataset::new(Matrix::from_vec(rows, cols, x_data), Matrix::from_vec(rows, p, t_data)))
}

fn write_train_log(path: &Path, log: &TrainLog) -> Result<()> {
    let mut text = String::from("epoch,train_mse,eval_mse,selected\n");
    for (i, e) in log.epochs.iter().enumerate() {
        let selected = usize::from(i == log.best_epoch);
        text.push_str(&format!("{},{},{},{}\n", i + 1, e.train_mse, e.eval_mse, selected));
    }
    write_text(path, &text)
}

/// Fit the summary network for this config's method and persist the best
/// snapshot plus a per-epoch loss log. Handpicked methods have nothing to
/// train and return immediately.
pub fn cmd_train(cfg: &ExperimentConfig) -> Result<()> {
    cfg.validate()?;
    if !cfg.method.is_trained() {
        return Ok(());
    }
    let paths = Paths::new(&cfg.output_dir);
    record_config(cfg, &paths)?;
    require_simulated(cfg, &paths)?;
    let cell = cell_name(cfg);
    let hash = stage_hash(&train_descriptor(cfg));
    let manifest = paths.manifest(&format!("train-{cell}"));
    if paths.net_weights(&cell).exists() && manifest_matches(&manifest, &hash) {
        return Ok(());
    }

    let train_table = read_reference_table(paths.train_dir(), cfg.model)?;
    let train_data = build_dataset(cfg, &train_table, cfg.n_train, "training")?;
    drop(train_table);
    let eval_table = read_reference_table(paths.eval_dir(), cfg.model)?;
    let eval_data = build_dataset(cfg, &eval_table, cfg.n_eval, "evaluation")?;
    drop(eval_table);

    let tree = SeedTree::new(cfg.seed);
    let train_cfg = TrainConfig {
        n_train: cfg.n_train,
        n_eval: cfg.n_eval,
        epochs: cfg.epochs,
        batch_size: cfg.batch_size.min(cfg.n_train),
        learning_rate: cfg.learning_rate,
        seed: tree.child("sgd").child(&cell).seed(),
    };
    let mut init_rng = tree.child("init").child(&cell).rng();

    let (net, log) = match cfg.method {
        Method::Pen { d } => {
            let spec = pen_spec(cfg.model, d)?;
            let regressor = PenNet::new(spec.clone(), cfg.series_len);
            let w0 = init_pen_weights(&spec, cfg.series_len, &mut init_rng);
            let (weights, log) = train(&regressor, w0, &train_data, &eval_data, &train_cfg)?;
            (TrainedNet::Pen { spec, weights }, log)
        }
        _ => {
            let spec = mlp_spec_for(cfg.model, cfg.method.summary_method())?;
            let regressor = MlpNet { spec: spec.clone() };
            let w0 = init_weights(&spec, &mut init_rng);
            let (weights, log) = train(&regressor, w0, &train_data, &eval_data, &train_cfg)?;
            (TrainedNet::Mlp { spec, weights }, log)
        }
    };

    ensure_parent(&paths.net_weights(&cell))?;
    save_trained_net(paths.net_weights(&cell), &net)?;
    write_train_log(&paths.train_log(&cell), &log)?;
    write_text(&manifest, &hash)
}

// -------------------------------------------------------------------------
// Stage 3: ABC rejection

fn load_net_for(cfg: &ExperimentConfig, paths: &Paths) -> Result<Option<TrainedNet>> {
    if !cfg.method.is_trained() {
        return Ok(None);
    }
    let cell = cell_name(cfg);
    let path = paths.net_weights(&cell);
    if !path.exists() {
        return Err(missing_stage(&path, "no trained network here; run `penabc train` first"));
    }
    let net = load_trained_net(&path)?;
    let matches = matches!(
        (&net, cfg.method),
        (TrainedNet::Mlp { .. }, Method::MlpSmall | Method::MlpLarge | Method::MlpPre)
    ) || matches!((&net, cfg.method), (TrainedNet::Pen { spec, .. }, Method::Pen { d }) if spec.d == d);
    if !matches {
        return Err(Error::Format {
            path: path.display().to_string(),
            detail: format!("weights belong to a different method than {}", cfg.method.label()),
        });
    }
    Ok(Some(net))
}

/// Compute summaries for every table row. Identical to the library routine,
/// but fans the (pure, per-row) summary function out across workers.
fn summarize_table_threaded<F>(table: &mut ReferenceTable, threads: usize, f: F) -> Result<()>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    if threads <= 1 {
        return summarize_table(table, f);
    }
    let rows = parallel_map(threads, table.series.len(), |i| {
        f(&table.series[i]).map_err(|e| Error::Simulator { index: i, source: Box::new(e) })
    })?;
    let mut width = None;
    for (i, s) in rows.iter().enumerate() {
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
    }
    table.summaries = Some(rows);
    Ok(())
}

/// Summarize the reference table under this config's method and run
/// rejection against each observed data set, writing one posterior CSV per
/// repetition.
pub fn cmd_abc(cfg: &ExperimentConfig) -> Result<()> {
    cfg.validate()?;
    let paths = Paths::new(&cfg.output_dir);
    record_config(cfg, &paths)?;
    require_simulated(cfg, &paths)?;
    let cell = cell_name(cfg);
    let hash = stage_hash(&abc_descriptor(cfg));
    let manifest = paths.manifest(&format!("abc-{cell}"));
    let all_exist = (0..cfg.repetitions).all(|r| paths.posterior_csv(&cell, r).exists());
    if all_exist && manifest_matches(&manifest, &hash) {
        return Ok(());
    }

    require_trained(cfg, &paths, &cell)?;
    let net = load_net_for(cfg, &paths)?;
    let sm = cfg.method.summary_method();
    let observed = read_series_bin(paths.observed())?;
    if observed.len() < cfg.repetitions {
        return Err(Error::Config(format!(
            "observed data holds {} repetitions but the config asks for {}; rerun `penabc simulate`",
            observed.len(),
            cfg.repetitions
        )));
    }

    let mut table = read_reference_table(paths.table_dir(), cfg.model)?;
    summarize_table_threaded(&mut table, cfg.threads, |y| summarize_series(cfg.model, sm, net.as_ref(), y))?;
    let weights = metric_weights(cfg.model, sm);

    ensure_parent(&paths.posterior_csv(&cell, 0))?;
    for (r, y_obs) in observed.iter().take(cfg.repetitions).enumerate() {
        let s_obs = summarize_series(cfg.model, sm, net.as_ref(), y_obs)?;
        let posterior = rejection_sample(&table, &s_obs, cfg.percentile_x, &weights)?;
        write_posterior_csv(paths.posterior_csv(&cell, r), &posterior)?;
    }
    write_text(&manifest, &hash)
}

// -------------------------------------------------------------------------
// Stage 4: evaluate

/// Reference posterior sample for one observed data set: the exact grid
/// posterior for the 2-D time-series models, a tuned random-walk Metropolis
/// chain on the finite-difference density for g-and-k. Cached per repetition
/// and shared by every method.
fn build_reference_sample(cfg: &ExperimentConfig, y_obs: &Series, rep: usize, keep: usize) -> Result<PosteriorSample> {
    let tree = SeedTree::new(cfg.seed).child("reference");
    match cfg.model {
        ModelId::Ar2 | ModelId::Ma2 => {
            let prior = PriorSpec::new(cfg.model);
            let y = y_obs.clone();
            let loglik = match cfg.model {
                ModelId::Ar2 => LogDensity::new(move |t| ar2_loglik(t, &y), move |t| prior.in_support(t)),
                _ => LogDensity::new(
                    move |t| ma2_loglik(t, &y, penabc::models::ma2::DEFAULT_SIGMA_EPS),
                    move |t| prior.in_support(t),
                ),
            };
            let gp = grid_posterior(&loglik, &prior, cfg.grid_resolution)?;
            Ok(sample_grid(&gp, keep, &mut tree.child("grid").index_rng(rep as u64)))
        }
        ModelId::Gandk => {
            let logpost = gandk_log_posterior(y_obs.clone());
            let init = ground_truth(cfg.model);
            // Pilot-tune a global scale factor into the 20–45% acceptance
            // band, then run the real chain. All draws are seed-derived, so
            // the tuning is reproducible.
            let base = [0.05, 0.08, 0.3, 0.06];
            let tune_tree = tree.child("mcmc-tune").child(&rep.to_string());
            let mut factor = 1.0f64;
            for round in 0..8u64 {
                let scale: Vec<f64> = base.iter().map(|s| s * factor).collect();
                let rate = match rw_metropolis(&logpost, &init, 2_000, &scale, &mut tune_tree.index_rng(round)) {
                    Ok(pilot) => pilot.acceptance_rate,
                    Err(Error::ZeroAcceptance(_)) => 0.0,
                    Err(e) => return Err(e),
                };
                if (0.2..=0.45).contains(&rate) {
                    break;
                }
                factor *= if rate > 0.45 { 2.0 } else { 0.5 };
            }
            let scale: Vec<f64> = base.iter().map(|s| s * factor).collect();
            let burn = cfg.mcmc_steps / 5;
            let stride = (cfg.mcmc_steps - burn) / keep;
            if stride == 0 {
                return Err(Error::Config(format!(
                    "mcmc_steps = {} cannot yield {keep} thinned reference draws; raise mcmc_steps",
                    cfg.mcmc_steps
                )));
            }
            let result = rw_metropolis(
                &logpost,
                &init,
                cfg.mcmc_steps,
                &scale,
                &mut tree.child("mcmc").index_rng(rep as u64),
            )?;
            let mut thinned = thin_chain(&result, burn, stride);
            thinned.draws.truncate(keep);
            Ok(thinned)
        }
        ModelId::AlphaStable => Err(Error::Config(
            "alpha_stable has no tractable reference posterior; it is scored by RMSE".into(),
        )),
    }
}

fn reference_sample_cached(
    cfg: &ExperimentConfig,
    paths: &Paths,
    y_obs: &Series,
    rep: usize,
    keep: usize,
) -> Result<PosteriorSample> {
    let path = paths.reference_csv(rep);
    if path.exists() {
        let cached = read_posterior_csv(&path, cfg.model)?;
        if cached.draws.len() == keep {
            return Ok(cached);
        }
    }
    let sample = build_reference_sample(cfg, y_obs, rep, keep)?;
    ensure_parent(&path)?;
    write_posterior_csv(&path, &sample)?;
    Ok(sample)
}

/// Score each repetition's ABC posterior and append tidy rows to
/// `results.csv`: Wasserstein distance to the reference posterior where one
/// exists, squared posterior-mean error (in the original parameter space)
/// for α-stable.
pub fn cmd_evaluate(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let paths = Paths::new(&cfg.output_dir);
    record_config(cfg, &paths)?;
    let cell = cell_name(cfg);
    let hash = stage_hash(&evaluate_descriptor(cfg));
    let manifest = paths.manifest(&format!("evaluate-{cell}"));
    if manifest_matches(&manifest, &hash) && paths.results_csv().exists() {
        let n_train = effective_n_train(cfg);
        let rows = read_result_rows(paths.results_csv())?
            .into_iter()
            .filter(|row| row.method == cfg.method.label() && row.n_train == n_train && row.seed == cfg.seed)
            .collect();
        return Ok(rows);
    }

    require_abc(cfg, &paths, &cell)?;
    let observed = read_series_bin(paths.observed())?;
    let n_train = effective_n_train(cfg);

    let rows: Vec<ResultRow> = parallel_map(cfg.threads, cfg.repetitions, |r| {
        let abc_posterior = read_posterior_csv(paths.posterior_csv(&cell, r), cfg.model)?;
        let (metric, value) = match cfg.model {
            ModelId::AlphaStable => {
                // Posterior mean in the original (α, β, γ, δ) space vs the
                // true generating values.
                let truth = ground_truth_natural(cfg.model);
                let mut mean = vec![0.0; truth.len()];
                for draw in &abc_posterior.draws {
                    let natural = penabc::models::alpha_stable::inverse_transform_alpha_params(draw);
                    for (m, v) in mean.iter_mut().zip(natural) {
                        *m += v;
                    }
                }
                for m in &mut mean {
                    *m /= abc_posterior.draws.len() as f64;
                }
                let sq_err: f64 = mean.iter().zip(&truth).map(|(m, t)| (m - t) * (m - t)).sum();
                ("sq_err", sq_err)
            }
            _ => {
                let reference =
                    reference_sample_cached(cfg, &paths, &observed[r], r, abc_posterior.draws.len())?;
                ("wasserstein", penabc::reference::wasserstein(&abc_posterior, &reference)?)
            }
        };
        Ok(ResultRow {
            model: cfg.model,
            method: cfg.method.label(),
            n_train,
            seed: cfg.seed,
            rep: r,
            metric: metric.to_string(),
            value,
        })
    })?;

    // Replace any rows this cell wrote under earlier settings, so a
    // re-evaluation never leaves duplicates behind.
    let results_path = paths.results_csv();
    let mut combined: Vec<ResultRow> = if results_path.exists() {
        read_result_rows(&results_path)?
            .into_iter()
            .filter(|row| !(row.method == cfg.method.label() && row.n_train == n_train && row.seed == cfg.seed))
            .collect()
    } else {
        Vec::new()
    };
    combined.extend(rows.iter().cloned());
    if results_path.exists() {
        std::fs::remove_file(&results_path).map_err(|e| io_error(&results_path, e))?;
    }
    append_result_rows(&results_path, &combined)?;
    write_text(&manifest, &hash)?;
    Ok(rows)
}

/// All four stages in order — the one-config entry point.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cmd_simulate(cfg)?;
    cmd_train(cfg)?;
    cmd_abc(cfg)?;
    cmd_evaluate(cfg)
}
