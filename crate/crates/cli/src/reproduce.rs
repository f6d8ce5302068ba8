//! One-command reproduction of the benchmark comparisons: a figure id plus a
//! scale expands into a grid of (method × training size) cells, all sharing
//! one output directory, one simulation pass, and one set of reference
//! posteriors.

use crate::config::{epochs_for, ExperimentConfig, Method, Scale};
use crate::pipeline::{run_experiment, Paths};
use penabc::io::{append_result_rows, read_result_rows, ResultRow};
use penabc::models::default_series_len;
use penabc::{Error, ModelId, Result};
use std::collections::BTreeMap;

/// Everything that varies between benchmark figures. Fields are public so
/// callers (and tests) can shrink a grid before running it.
#[derive(Debug, Clone)]
pub struct FigureGrid {
    pub id: String,
    pub model: ModelId,
    pub methods: Vec<Method>,
    pub n_train_grid: Vec<usize>,
    pub repetitions: usize,
    pub n_tilde: usize,
    pub percentile_x: f64,
    pub n_eval: usize,
    pub series_len: usize,
    pub grid_resolution: usize,
    pub mcmc_steps: usize,
}

pub const FIGURE_IDS: [&str; 4] = ["gandk-wasserstein", "alpha-rmse", "ar2-wasserstein", "ma2-wasserstein"];

/// The benchmark grid behind a figure id. Desk scale keeps each figure's
/// comparison meaningful on a laptop; paper scale is the full published
/// study (hours to days of CPU).
pub fn figure_grid(id: &str, scale: Scale) -> Result<FigureGrid> {
    let (model, desk_methods, paper_methods): (ModelId, Vec<Method>, Vec<Method>) = match id {
        "gandk-wasserstein" => (
            ModelId::Gandk,
            vec![Method::Handpicked, Method::MlpLarge, Method::Pen { d: 0 }],
            vec![
                Method::Handpicked,
                Method::MlpSmall,
                Method::MlpLarge,
                Method::MlpPre,
                Method::Pen { d: 0 },
            ],
        ),
        "alpha-rmse" => (
            ModelId::AlphaStable,
            vec![Method::MlpPre, Method::Pen { d: 0 }],
            vec![
                Method::Handpicked,
                Method::MlpSmall,
                Method::MlpLarge,
                Method::MlpPre,
                Method::Pen { d: 0 },
            ],
        ),
        "ar2-wasserstein" => (
            ModelId::Ar2,
            vec![Method::MlpLarge, Method::Pen { d: 2 }],
            vec![
                Method::Handpicked,
                Method::MlpSmall,
                Method::MlpLarge,
                Method::Pen { d: 0 },
                Method::Pen { d: 2 },
            ],
        ),
        "ma2-wasserstein" => (
            ModelId::Ma2,
            vec![Method::MlpLarge, Method::Pen { d: 10 }],
            vec![
                Method::Handpicked,
                Method::MlpSmall,
                Method::MlpLarge,
                Method::Pen { d: 0 },
                Method::Pen { d: 10 },
            ],
        ),
        _ => {
            return Err(Error::Config(format!(
                "unknown figure id {id:?}; available: {}",
                FIGURE_IDS.join(", ")
            )))
        }
    };

    let iid = matches!(model, ModelId::Gandk | ModelId::AlphaStable);
    let grid = match scale {
        Scale::Desk => FigureGrid {
            id: id.to_string(),
            model,
            methods: desk_methods,
            n_train_grid: match model {
                ModelId::Gandk => vec![10_000],
                ModelId::AlphaStable => vec![1_000],
                _ => vec![1_000, 10_000],
            },
            repetitions: if model == ModelId::Ar2 { 20 } else { 10 },
            n_tilde: 100_000,
            percentile_x: 0.1,
            n_eval: 1_000,
            series_len: default_series_len(model),
            grid_resolution: 128,
            mcmc_steps: 25_000,
        },
        Scale::Paper => FigureGrid {
            id: id.to_string(),
            model,
            methods: paper_methods,
            n_train_grid: if iid {
                vec![1_000, 10_000, 100_000, 500_000]
            } else {
                vec![1_000, 10_000, 100_000, 1_000_000]
            },
            repetitions: if model == ModelId::AlphaStable { 25 } else { 100 },
            n_tilde: if iid { 100_000 } else { 500_000 },
            percentile_x: if iid { 0.1 } else { 0.02 },
            n_eval: match model {
                ModelId::Gandk | ModelId::AlphaStable => 5_000,
                ModelId::Ar2 => 10_000,
                ModelId::Ma2 => 500_000,
            },
            series_len: default_series_len(model),
            grid_resolution: 256,
            mcmc_steps: 100_000,
        },
    };
    Ok(grid)
}

fn cell_config(grid: &FigureGrid, method: Method, n_train: usize, pool: usize, output_dir: &str, seed: u64, threads: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::desk(grid.model, method);
    cfg.series_len = grid.series_len;
    cfg.n_train = n_train;
    cfg.n_eval = grid.n_eval;
    cfg.pool_train = pool;
    cfg.pool_eval = grid.n_eval;
    cfg.n_tilde = grid.n_tilde;
    cfg.percentile_x = grid.percentile_x;
    cfg.repetitions = grid.repetitions;
    cfg.seed = seed;
    cfg.output_dir = output_dir.into();
    cfg.epochs = epochs_for(n_train);
    cfg.grid_resolution = grid.grid_resolution;
    cfg.mcmc_steps = grid.mcmc_steps;
    cfg.threads = threads;
    cfg
}

/// Run every cell of a figure grid and aggregate `results.csv` into
/// `summary.csv`. Already-complete cells are skipped via their stage
/// manifests, so an interrupted reproduction picks up where it stopped.
pub fn cmd_reproduce(grid: &FigureGrid, output_dir: &str, seed: u64, threads: usize) -> Result<Vec<ResultRow>> {
    let pool = *grid
        .n_train_grid
        .iter()
        .max()
        .ok_or_else(|| Error::Config("figure grid has no training sizes".into()))?;
    for &method in &grid.methods {
        // Handpicked summaries ignore the training size, so that axis
        // collapses to a single cell.
        let trains: Vec<usize> = if method.is_trained() { grid.n_train_grid.clone() } else { vec![pool] };
        for &n_train in &trains {
            let cfg = cell_config(grid, method, n_train, pool, output_dir, seed, threads);
            let rows = run_experiment(&cfg)?;
            let mean = rows.iter().map(|r| r.value).sum::<f64>() / rows.len().max(1) as f64;
            println!(
                "[{}] {} n_train={}: {} repetitions, mean {} = {:.4}",
                grid.id,
                method.label(),
                n_train,
                rows.len(),
                rows.first().map(|r| r.metric.as_str()).unwrap_or("metric"),
                mean
            );
        }
    }
    write_summary(&Paths::new(output_dir))
}

/// Collapse per-repetition rows into one row per (method, training size):
/// `wasserstein` averages to `wasserstein_mean`, `sq_err` aggregates to
/// `rmse`. The `rep` column of a summary row records how many repetitions
/// went in.
pub fn write_summary(paths: &Paths) -> Result<Vec<ResultRow>> {
    let rows = read_result_rows(paths.results_csv())?;
    let mut groups: BTreeMap<(String, usize, u64, String), (ModelId, Vec<f64>)> = BTreeMap::new();
    for row in rows {
        groups
            .entry((row.method.clone(), row.n_train, row.seed, row.metric.clone()))
            .or_insert_with(|| (row.model, Vec::new()))
            .1
            .push(row.value);
    }
    let summary: Vec<ResultRow> = groups
        .into_iter()
        .map(|((method, n_train, seed, metric), (model, values))| {
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            let (agg_metric, value) = match metric.as_str() {
                "sq_err" => ("rmse".to_string(), mean.sqrt()),
                other => (format!("{other}_mean"), mean),
            };
            ResultRow { model, method, n_train, seed, rep: values.len(), metric: agg_metric, value }
        })
        .collect();
    let path = paths.summary_csv();
    if path.exists() {
        std::fs::remove_file(&path)
            .map_err(|e| Error::Io { path: path.display().to_string(), source: e })?;
    }
    append_result_rows(&path, &summary)?;
    Ok(summary)
}
