use clap::{Parser, Subcommand};
use penabc::Error;
use penabc_cli::config::{ExperimentConfig, Scale};
use penabc_cli::pipeline::{cmd_abc, cmd_evaluate, cmd_simulate, cmd_train, Paths};
use penabc_cli::reproduce::{cmd_reproduce, figure_grid};
use std::path::PathBuf;

/// Likelihood-free inference benchmarks: learned summary statistics for ABC
/// rejection sampling, scored against exact or near-exact posteriors.
#[derive(Parser)]
#[command(name = "penabc", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Flat TOML experiment config (required by simulate/train/abc/evaluate).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override the config's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Benchmark size for `reproduce`: `desk` finishes in minutes, `paper`
    /// is the full published study.
    #[arg(long, global = true, default_value = "desk")]
    scale: Scale,

    /// Worker threads for per-repetition fan-out. Changes wall time only,
    /// never the emitted numbers.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate observed data sets, the ABC reference table, and the
    /// training/evaluation pools.
    Simulate,
    /// Fit the summary network for the configured method and keep the epoch
    /// snapshot with the lowest held-out MSE.
    Train,
    /// Summarize the reference table and run rejection sampling against each
    /// observed data set.
    Abc,
    /// Score each repetition's ABC posterior against the reference posterior
    /// (or by RMSE where no reference exists) and append tidy metric rows.
    Evaluate,
    /// Run a whole benchmark figure — every method and training size — and
    /// aggregate the results.
    Reproduce {
        /// Which comparison to run: gandk-wasserstein, alpha-rmse,
        /// ar2-wasserstein, or ma2-wasserstein.
        figure: String,

        /// Where to put the run (default: runs/<figure>-<scale>).
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
}

fn load_config(cli: &Cli) -> penabc::Result<ExperimentConfig> {
    let path = cli.config.as_deref().ok_or_else(|| {
        Error::Config("missing --config: this command reads a flat TOML experiment config".into())
    })?;
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(threads) = cli.threads {
        cfg.threads = threads;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> penabc::Result<()> {
    match &cli.command {
        Command::Simulate => {
            let cfg = load_config(cli)?;
            cmd_simulate(&cfg)?;
            println!("simulated data ready under {}", cfg.output_dir.display());
        }
        Command::Train => {
            let cfg = load_config(cli)?;
            cmd_train(&cfg)?;
            if cfg.method.is_trained() {
                println!("trained {} network ready under {}", cfg.method.label(), cfg.output_dir.display());
            } else {
                println!("handpicked summaries need no training; nothing to do");
            }
        }
        Command::Abc => {
            let cfg = load_config(cli)?;
            cmd_abc(&cfg)?;
            println!(
                "{} posterior draws per repetition written under {}",
                cfg.retention_count(),
                cfg.output_dir.display()
            );
        }
        Command::Evaluate => {
            let cfg = load_config(cli)?;
            let rows = cmd_evaluate(&cfg)?;
            let mean = rows.iter().map(|r| r.value).sum::<f64>() / rows.len().max(1) as f64;
            let metric = rows.first().map(|r| r.metric.as_str()).unwrap_or("metric");
            println!(
                "{} repetitions scored; mean {metric} = {mean:.6}; rows appended to {}",
                rows.len(),
                Paths::new(&cfg.output_dir).results_csv().display()
            );
        }
        Command::Reproduce { figure, output_dir } => {
            let grid = figure_grid(figure, cli.scale)?;
            let scale_name = match cli.scale {
                Scale::Desk => "desk",
                Scale::Paper => "paper",
            };
            let out = output_dir
                .clone()
                .unwrap_or_else(|| PathBuf::from(format!("runs/{figure}-{scale_name}")));
            let out = out.to_string_lossy().into_owned();
            let summary = cmd_reproduce(&grid, &out, cli.seed.unwrap_or(1), cli.threads.unwrap_or(1))?;
            println!(
                "{} summary rows written to {}",
                summary.len(),
                Paths::new(out.as_str()).summary_csv().display()
            );
        }
    }
    Ok(())
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            // --help/--version are successful exits; everything else is a
            // config error.
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(&cli) {
        eprintln!("error: {e}");
        let code = match e {
            Error::Config(_) => 1,
            _ => 2,
        };
        std::process::exit(code);
    }
}
