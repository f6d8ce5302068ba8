//! End-to-end checks of the staged pipeline on a deliberately tiny AR(2)
//! experiment: a 2000-row table, 300 training rows, 10 epochs, 2
//! repetitions. Small enough to run in seconds, complete enough to exercise
//! every artifact the real experiments produce.

use penabc::io::{read_posterior_csv, read_series_bin};
use penabc::models::PriorSpec;
use penabc::neuralnet::count_weights;
use penabc::presets::TrainedNet;
use penabc::ModelId;
use penabc_cli::config::{ExperimentConfig, Scale};
use penabc_cli::pipeline::{cmd_abc, cmd_evaluate, cmd_simulate, cmd_train, run_experiment, Paths};
use penabc_cli::reproduce::figure_grid;
use std::path::Path;
use std::process::Command;

fn ar2_toml(out: &Path, seed: u64) -> String {
    format!(
        "model = \"ar2\"\n\
         method = \"pen\"\n\
         pen_d = 2\n\
         n_train = 300\n\
         n_eval = 100\n\
         n_tilde = 2000\n\
         percentile_x = 0.5\n\
         repetitions = 2\n\
         seed = {seed}\n\
         output_dir = \"{}\"\n\
         epochs = 10\n\
         batch_size = 100\n\
         grid_resolution = 64\n",
        out.display()
    )
}

fn tiny_config(out: &Path, seed: u64) -> ExperimentConfig {
    ExperimentConfig::from_toml_str(&ar2_toml(out, seed), "test").unwrap()
}

fn read_train_log(path: &Path) -> Vec<(f64, f64, bool)> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .skip(1)
        .map(|line| {
            let mut f = line.split(',');
            let _epoch: usize = f.next().unwrap().parse().unwrap();
            let train: f64 = f.next().unwrap().parse().unwrap();
            let eval: f64 = f.next().unwrap().parse().unwrap();
            let selected = f.next().unwrap() == "1";
            (train, eval, selected)
        })
        .collect()
}

#[test]
fn four_stages_produce_the_documented_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let cfg = tiny_config(&out, 7);
    let paths = Paths::new(&out);

    cmd_simulate(&cfg).unwrap();
    for artifact in [
        paths.observed(),
        paths.table_dir().join("params.bin"),
        paths.table_dir().join("series.bin"),
        paths.train_dir().join("series.bin"),
        paths.eval_dir().join("series.bin"),
        paths.manifest("simulate"),
        paths.config_echo("pen2_n300"),
    ] {
        assert!(artifact.exists(), "missing {}", artifact.display());
    }
    let observed = read_series_bin(paths.observed()).unwrap();
    assert_eq!(observed.len(), 2, "one series per repetition");
    assert!(observed.iter().all(|y| y.len() == 100));

    cmd_train(&cfg).unwrap();
    let net = penabc::io::load_trained_net(paths.net_weights("pen2_n300")).unwrap();
    match &net {
        TrainedNet::Pen { spec, .. } => assert_eq!(count_weights(spec), 10222),
        other => panic!("expected PEN weights, got {other:?}"),
    }
    let log = read_train_log(&paths.train_log("pen2_n300"));
    assert_eq!(log.len(), 10, "one row per epoch");
    let best = log.iter().find(|(_, _, sel)| *sel).expect("a selected epoch");
    assert!(best.1 <= log[0].1, "kept snapshot cannot be worse than epoch 1");
    assert!(best.1 <= log.iter().map(|r| r.1).fold(f64::INFINITY, f64::min) + 1e-15);

    cmd_abc(&cfg).unwrap();
    let prior = PriorSpec::new(ModelId::Ar2);
    for rep in 0..2 {
        let sample = read_posterior_csv(paths.posterior_csv("pen2_n300", rep), ModelId::Ar2).unwrap();
        assert_eq!(sample.draws.len(), 10, "floor(2000 * 0.5 / 100) retained draws");
        assert!(sample.draws.iter().all(|t| prior.in_support(t)), "retained draws obey the prior support");
        assert!(sample.distances.windows(2).all(|w| w[0] <= w[1]), "distances come out sorted");
    }

    let rows = cmd_evaluate(&cfg).unwrap();
    assert_eq!(rows.len(), 2, "one metric row per repetition");
    for row in &rows {
        assert_eq!(row.metric, "wasserstein");
        assert_eq!(row.n_train, 300);
        assert!(row.value.is_finite() && row.value >= 0.0);
    }
    for rep in 0..2 {
        let reference = read_posterior_csv(paths.reference_csv(rep), ModelId::Ar2).unwrap();
        assert_eq!(reference.draws.len(), 10, "reference sample matches the ABC sample size");
    }
}

#[test]
fn finished_stages_are_no_ops() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let cfg = tiny_config(&out, 11);
    let paths = Paths::new(&out);

    let first_rows = run_experiment(&cfg).unwrap();
    let results = std::fs::read(paths.results_csv()).unwrap();
    let weights = std::fs::read(paths.net_weights("pen2_n300")).unwrap();
    let posterior = std::fs::read(paths.posterior_csv("pen2_n300", 0)).unwrap();

    let second_rows = run_experiment(&cfg).unwrap();
    assert_eq!(first_rows, second_rows, "skip path reports the same rows");
    assert_eq!(std::fs::read(paths.results_csv()).unwrap(), results, "no duplicate rows appended");
    assert_eq!(std::fs::read(paths.net_weights("pen2_n300")).unwrap(), weights);
    assert_eq!(std::fs::read(paths.posterior_csv("pen2_n300", 0)).unwrap(), posterior);
}

#[test]
fn same_seed_reproduces_bytes_and_different_seed_does_not() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));

    run_experiment(&tiny_config(&a, 7)).unwrap();
    run_experiment(&tiny_config(&b, 7)).unwrap();
    run_experiment(&tiny_config(&c, 8)).unwrap();

    for file in ["results.csv", "nets/pen2_n300.weights", "posteriors/pen2_n300/rep_0.csv", "reference/rep_0.csv"] {
        let bytes_a = std::fs::read(a.join(file)).unwrap();
        let bytes_b = std::fs::read(b.join(file)).unwrap();
        assert_eq!(bytes_a, bytes_b, "{file} must be byte-identical under the same seed");
    }
    assert_ne!(
        std::fs::read(a.join("results.csv")).unwrap(),
        std::fs::read(c.join("results.csv")).unwrap(),
        "a different seed must change the numbers"
    );
}

#[test]
fn threads_do_not_change_the_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));

    run_experiment(&tiny_config(&a, 3)).unwrap();
    let mut threaded = tiny_config(&b, 3);
    threaded.threads = 4;
    run_experiment(&threaded).unwrap();

    for file in ["results.csv", "posteriors/pen2_n300/rep_1.csv", "reference/rep_1.csv"] {
        assert_eq!(
            std::fs::read(a.join(file)).unwrap(),
            std::fs::read(b.join(file)).unwrap(),
            "{file} must not depend on the worker count"
        );
    }
}

#[test]
fn every_model_evaluates_end_to_end_with_handpicked_summaries() {
    // Handpicked summaries skip training, so this exercises each model's
    // evaluate branch — grid references for the time-series models, the
    // tuned MCMC reference for g-and-k, RMSE for alpha-stable — in seconds.
    let dir = tempfile::tempdir().unwrap();
    for (model, metric) in [("ma2", "wasserstein"), ("gandk", "wasserstein"), ("alpha_stable", "sq_err")] {
        let out = dir.path().join(model);
        let toml = format!(
            "model = \"{model}\"\n\
             method = \"handpicked\"\n\
             series_len = 100\n\
             n_train = 300\n\
             n_eval = 100\n\
             n_tilde = 2000\n\
             percentile_x = 0.5\n\
             repetitions = 1\n\
             seed = 5\n\
             output_dir = \"{}\"\n\
             grid_resolution = 64\n\
             mcmc_steps = 1000\n",
            out.display()
        );
        let cfg = ExperimentConfig::from_toml_str(&toml, "test").unwrap();
        let rows = run_experiment(&cfg).unwrap();
        assert_eq!(rows.len(), 1, "{model}: one row per repetition");
        assert_eq!(rows[0].metric, metric, "{model} scores by {metric}");
        assert_eq!(rows[0].n_train, 0, "handpicked rows record no training size");
        assert!(rows[0].value.is_finite() && rows[0].value >= 0.0);

        let paths = Paths::new(&out);
        assert!(paths.posterior_csv("handpicked", 0).exists(), "{model}: handpicked cell has no n_train suffix");
        let has_reference = paths.reference_csv(0).exists();
        assert_eq!(has_reference, metric == "wasserstein", "{model}: reference sample only where one is defined");
        if has_reference {
            let model_id = ModelId::from_name(model).unwrap();
            let reference = read_posterior_csv(paths.reference_csv(0), model_id).unwrap();
            assert_eq!(reference.draws.len(), 10, "{model}: reference matched to the 10 retained draws");
        }
    }
}

#[test]
fn exit_codes_separate_config_errors_from_missing_state() {
    let exe = env!("CARGO_BIN_EXE_penabc");
    let dir = tempfile::tempdir().unwrap();

    let help = Command::new(exe).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0), "--help is a successful exit");

    let bad_flag = Command::new(exe).arg("--bogus").output().unwrap();
    assert_eq!(bad_flag.status.code(), Some(1), "usage errors are config errors");

    let no_config = Command::new(exe).arg("simulate").output().unwrap();
    assert_eq!(no_config.status.code(), Some(1), "a missing --config is a config error");

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "model = \"ar2\"\nmethod = \"pen\"\n").unwrap();
    let bad_cfg = Command::new(exe).args(["simulate", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(bad_cfg.status.code(), Some(1), "pen without pen_d is a config error");

    let good = dir.path().join("good.toml");
    std::fs::write(&good, ar2_toml(&dir.path().join("run"), 7)).unwrap();
    for stage in ["train", "abc", "evaluate"] {
        let out = Command::new(exe).args([stage, "--config"]).arg(&good).output().unwrap();
        assert_eq!(
            out.status.code(),
            Some(2),
            "{stage} before simulate is a runtime failure, not a config error"
        );
        let msg = String::from_utf8_lossy(&out.stderr);
        assert!(msg.contains("penabc"), "error message suggests the missing stage: {msg}");
    }
}

#[test]
fn figure_grids_pin_the_benchmark_settings() {
    let err = figure_grid("nope", Scale::Desk).unwrap_err();
    assert!(err.to_string().contains("ar2-wasserstein"), "unknown ids list the real ones: {err}");

    let ar2 = figure_grid("ar2-wasserstein", Scale::Desk).unwrap();
    assert_eq!(ar2.n_train_grid, vec![1_000, 10_000]);
    assert_eq!(ar2.repetitions, 20);
    assert_eq!(ar2.n_tilde, 100_000);
    assert_eq!(ar2.percentile_x, 0.1);

    let alpha = figure_grid("alpha-rmse", Scale::Desk).unwrap();
    assert_eq!(alpha.n_train_grid, vec![1_000]);
    assert_eq!(alpha.repetitions, 10);

    let gandk_paper = figure_grid("gandk-wasserstein", Scale::Paper).unwrap();
    assert_eq!(gandk_paper.n_train_grid, vec![1_000, 10_000, 100_000, 500_000]);
    assert_eq!(gandk_paper.repetitions, 100);
    assert_eq!(gandk_paper.methods.len(), 5);

    let ma2_paper = figure_grid("ma2-wasserstein", Scale::Paper).unwrap();
    assert_eq!(ma2_paper.n_tilde, 500_000);
    assert_eq!(ma2_paper.percentile_x, 0.02);
    assert_eq!(ma2_paper.n_train_grid, vec![1_000, 10_000, 100_000, 1_000_000]);
}
