//! Experiment driver for the `penabc` library: flat-TOML configs, the four
//! resumable pipeline stages (simulate → train → abc → evaluate), and
//! one-command reproduction of the benchmark figures.

pub mod config;
pub mod pipeline;
pub mod reproduce;

pub use config::{epochs_for, ExperimentConfig, Method, Scale};
pub use pipeline::{
    cell_name, cmd_abc, cmd_evaluate, cmd_simulate, cmd_train, parallel_map, run_experiment, Paths,
};
pub use reproduce::{cmd_reproduce, figure_grid, write_summary, FigureGrid, FIGURE_IDS};
