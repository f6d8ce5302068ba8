//! Acceptance suite, part 1: library-level criteria.
//!
//! Each test is one criterion and prints a `ACCEPTANCE <n> …: PASS` line on
//! success (visible with `--nocapture`; the harness line carries the same
//! verdict either way). Criteria 7–10 exercise full experiment pipelines and
//! live in the CLI crate's acceptance suite.

use penabc::abc::{build_reference_table, rejection_sample, summarize_table, AbcConfig, ReferenceTable};
use penabc::linalg::Matrix;
use penabc::models::{ar2, ground_truth, ma2, simulate, PriorSpec};
use penabc::neuralnet::{
    backward_batch, count_weights, forward_batch, init_weights, mse_loss, mse_loss_grad, MlpSpec,
    MlpWeights, ParamTensors,
};
use penabc::pen::{
    init_pen_weights, is_d_block_switch_invariant, pen_backward_batch, pen_closure,
    pen_forward_batch, permutation_invariance_report, PenSpec, PenWeights, PoolOrder,
};
use penabc::presets::{mlp_spec_for, pen_preset, pen_spec, SummaryMethod, TrainedNet};
use penabc::reference::{ar2_loglik, assignment_wasserstein, gandk_logpdf, ma2_loglik, wasserstein_points};
use penabc::rng::{rng_from_seed, Rng};
use penabc::ModelId;
use rand::Rng as _;

// -------------------------------------------------------------------------
// Criterion 1 — weight-count fidelity

#[test]
fn criterion_1_weight_count_fidelity() {
    use ModelId::*;
    use SummaryMethod::*;
    let mlp_cases: &[(ModelId, SummaryMethod, usize)] = &[
        (Gandk, MlpSmall, 26_039),
        (Gandk, MlpLarge, 115_454),
        (Gandk, MlpPre, 25_454),
        (AlphaStable, MlpSmall, 26_089),
        (AlphaStable, MlpLarge, 115_654),
        (AlphaStable, MlpPre, 25_454),
        (Ar2, MlpSmall, 10_087),
        (Ar2, MlpLarge, 25_352),
        (Ma2, MlpSmall, 11_297),
        (Ma2, MlpLarge, 25_352),
    ];
    for &(model, method, want) in mlp_cases {
        let spec = mlp_spec_for(model, method).unwrap();
        let got = count_weights(&spec);
        assert_eq!(got, want, "{model:?} {}", method.label());
    }
    let pen_cases: &[(ModelId, usize, usize)] = &[
        (Gandk, 0, 22_214),
        (AlphaStable, 0, 23_924),
        (Ar2, 0, 9_922),
        (Ar2, 2, 10_222),
        (Ma2, 0, 9_922),
        (Ma2, 10, 11_422),
    ];
    for &(model, d, want) in pen_cases {
        let spec = pen_spec(model, d).unwrap();
        let got = count_weights(&spec);
        assert_eq!(got, want, "{model:?} pen{d}");
    }
    println!("ACCEPTANCE 1 (weight-count fidelity, {} configurations): PASS", mlp_cases.len() + pen_cases.len());
}

// -------------------------------------------------------------------------
// Criterion 2 — invariance suite

fn compact_pen(d: usize, seed: u64) -> (PenSpec, PenWeights) {
    let spec = PenSpec {
        d,
        inner: MlpSpec::relu_stack(&[d + 1, 24, 12, 6]),
        outer: MlpSpec::relu_stack(&[d + 6, 16, 8, 3]),
        extra_dim: 0,
    };
    spec.validate().unwrap();
    let w = init_pen_weights(&spec, 96, &mut rng_from_seed(seed));
    (spec, w)
}

#[test]
fn criterion_2_invariance_suite() {
    let mut rng = rng_from_seed(201);

    // PEN-d under planted d-block-switches, 1000 each.
    for &d in &[0usize, 1, 2, 10] {
        let (spec, w) = compact_pen(d, 300 + d as u64);
        let m = if d == 10 { 96 } else { 64 };
        let stream =
            is_d_block_switch_invariant(pen_closure(&spec, &w, PoolOrder::Stream), m, d, 1000, &mut rng)
                .unwrap();
        assert!(
            stream.max_rel_discrepancy <= 1e-9,
            "d={d}: stream-order discrepancy {}",
            stream.max_rel_discrepancy
        );
        let canonical =
            is_d_block_switch_invariant(pen_closure(&spec, &w, PoolOrder::Canonical), m, d, 1000, &mut rng)
                .unwrap();
        assert_eq!(canonical.max_rel_discrepancy, 0.0, "d={d}: canonical order must be exact");
    }

    // The published presets with no side features, probed more lightly.
    for (name, m, trials) in
        [("ar2-pen0", 100, 100), ("ar2-pen2", 100, 100), ("ma2-pen0", 100, 100), ("ma2-pen10", 100, 100), ("gk-pen0", 1000, 50)]
    {
        let (_, spec) = pen_preset(name).unwrap();
        let w = init_pen_weights(&spec, m, &mut rng_from_seed(77));
        let report =
            is_d_block_switch_invariant(pen_closure(&spec, &w, PoolOrder::Stream), m, spec.d, trials, &mut rng)
                .unwrap();
        assert!(report.max_rel_discrepancy <= 1e-9, "{name}: {}", report.max_rel_discrepancy);
    }

    // PEN-0 under 1000 full permutations.
    let (spec0, w0) = compact_pen(0, 300);
    let perm_stream =
        permutation_invariance_report(pen_closure(&spec0, &w0, PoolOrder::Stream), 64, 1000, &mut rng);
    assert!(perm_stream.max_rel_discrepancy <= 1e-9, "{}", perm_stream.max_rel_discrepancy);
    let perm_canonical =
        permutation_invariance_report(pen_closure(&spec0, &w0, PoolOrder::Canonical), 64, 1000, &mut rng);
    assert_eq!(perm_canonical.max_rel_discrepancy, 0.0);

    println!("ACCEPTANCE 2 (invariance suite, d ∈ {{0,1,2,10}} × 1000 switches + 1000 permutations): PASS");
}

// -------------------------------------------------------------------------
// Criterion 3 — gradient suite

/// Compare analytic gradients against central finite differences on ~12
/// probed parameters; returns the worst relative error seen.
fn probe_gradients(
    loss: &dyn Fn(&[f64]) -> f64,
    flat: &[f64],
    analytic: &[f64],
) -> f64 {
    let h = 1e-5;
    let stride = (flat.len() / 12).max(1);
    let mut worst = 0.0f64;
    for idx in (0..flat.len()).step_by(stride) {
        let mut plus = flat.to_vec();
        plus[idx] += h;
        let mut minus = flat.to_vec();
        minus[idx] -= h;
        let fd = (loss(&plus) - loss(&minus)) / (2.0 * h);
        let rel = (analytic[idx] - fd).abs() / fd.abs().max(1e-6);
        worst = worst.max(rel);
    }
    worst
}

fn flatten(tensors: &[&[f64]]) -> Vec<f64> {
    tensors.iter().flat_map(|t| t.iter().copied()).collect()
}

fn unflatten_into<T: ParamTensors>(flat: &[f64], target: &mut T) {
    let mut offset = 0;
    for tensor in target.tensors_mut() {
        tensor.copy_from_slice(&flat[offset..offset + tensor.len()]);
        offset += tensor.len();
    }
    assert_eq!(offset, flat.len());
}

#[test]
fn criterion_3_gradient_suite() {
    let mut rng = rng_from_seed(203);
    let mut worst = 0.0f64;

    // Ten random MLP shapes.
    for case in 0..10 {
        let in_dim = rng.gen_range(3..=10);
        let out_dim = rng.gen_range(1..=4);
        let mut dims = vec![in_dim];
        for _ in 0..rng.gen_range(1..=2usize) {
            dims.push(rng.gen_range(4..=12));
        }
        dims.push(out_dim);
        let spec = MlpSpec::relu_stack(&dims);
        let w = init_weights(&spec, &mut rng);
        let batch = rng.gen_range(3..=6);
        let x = Matrix::from_fn(batch, in_dim, |_, _| rng.gen_range(-1.0..1.0));
        let targets = Matrix::from_fn(batch, out_dim, |_, _| rng.gen_range(-1.0..1.0));

        let cache = forward_batch(&spec, &w, &x);
        let (_, grad_pred) = mse_loss_grad(cache.output(), &targets);
        let (grads, _) = backward_batch(&spec, &w, &cache, &grad_pred);

        let spec2 = spec.clone();
        let w0 = w.clone();
        let x2 = x.clone();
        let t2 = targets.clone();
        let loss = move |flat: &[f64]| {
            let mut wt: MlpWeights = w0.clone();
            unflatten_into(flat, &mut wt);
            mse_loss(forward_batch(&spec2, &wt, &x2).output(), &t2)
        };
        let rel = probe_gradients(&loss, &flatten(&w.tensors()), &flatten(&grads.tensors()));
        assert!(rel <= 1e-4, "mlp case {case}: worst relative error {rel}");
        worst = worst.max(rel);
    }

    // Ten random PEN shapes.
    for case in 0..10 {
        let d = rng.gen_range(0..=2usize);
        let latent = rng.gen_range(3..=6);
        let out_dim = rng.gen_range(1..=3);
        let extra_dim = if rng.gen_bool(0.5) { 2 } else { 0 };
        let spec = PenSpec {
            d,
            inner: MlpSpec::relu_stack(&[d + 1, rng.gen_range(5..=9), latent]),
            outer: MlpSpec::relu_stack(&[d + latent + extra_dim, rng.gen_range(5..=9), out_dim]),
            extra_dim,
        };
        spec.validate().unwrap();
        let w = init_pen_weights(&spec, 20, &mut rng);
        let batch = rng.gen_range(2..=4);
        let m = rng.gen_range(12..=20);
        let series = Matrix::from_fn(batch, m, |_, _| rng.gen_range(-1.0..1.0));
        let extras = Matrix::from_fn(batch, extra_dim, |_, _| rng.gen_range(-1.0..1.0));
        let targets = Matrix::from_fn(batch, out_dim, |_, _| rng.gen_range(-1.0..1.0));

        let cache = pen_forward_batch(&spec, &w, &series, &extras, PoolOrder::Stream).unwrap();
        let (_, grad_pred) = mse_loss_grad(cache.output(), &targets);
        let grads = pen_backward_batch(&spec, &w, &cache, &grad_pred);

        let spec2 = spec.clone();
        let w0 = w.clone();
        let s2 = series.clone();
        let e2 = extras.clone();
        let t2 = targets.clone();
        let loss = move |flat: &[f64]| {
            let mut wt: PenWeights = w0.clone();
            unflatten_into(flat, &mut wt);
            let cache = pen_forward_batch(&spec2, &wt, &s2, &e2, PoolOrder::Stream).unwrap();
            mse_loss(cache.output(), &t2)
        };
        let rel = probe_gradients(&loss, &flatten(&w.tensors()), &flatten(&grads.tensors()));
        assert!(rel <= 1e-4, "pen case {case} (d={d}): worst relative error {rel}");
        worst = worst.max(rel);
    }

    println!("ACCEPTANCE 3 (gradient suite, 20 random configurations, worst rel err {worst:.2e}): PASS");
}

// -------------------------------------------------------------------------
// Criterion 4 — Wasserstein oracle

fn random_points(n: usize, dim: usize, rng: &mut Rng) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect()
}

/// Independent factorial oracle: minimum canonical matching cost over all
/// n! pairings, built from scratch here.
fn factorial_wasserstein(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    fn dist(x: &[f64], y: &[f64]) -> f64 {
        x.iter().zip(y).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
    }
    fn cost(a: &[Vec<f64>], b: &[Vec<f64>], perm: &[usize]) -> f64 {
        let mut terms: Vec<f64> = perm.iter().enumerate().map(|(i, &j)| dist(&a[i], &b[j])).collect();
        terms.sort_by(f64::total_cmp);
        terms.iter().sum::<f64>() / perm.len() as f64
    }
    let n = a.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut counters = vec![0usize; n];
    let mut best = cost(a, b, &perm);
    let mut i = 0;
    while i < n {
        if counters[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(counters[i], i);
            }
            best = best.min(cost(a, b, &perm));
            counters[i] += 1;
            i = 0;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    best
}

#[test]
fn criterion_4_wasserstein_oracle() {
    let mut rng = rng_from_seed(204);
    for case in 0..100 {
        let n = 1 + case % 7;
        let a = random_points(n, 2, &mut rng);
        let b = random_points(n, 2, &mut rng);
        let solved = assignment_wasserstein(&a, &b).unwrap();
        let brute = factorial_wasserstein(&a, &b);
        assert_eq!(solved.to_bits(), brute.to_bits(), "2-D case {case} (n={n}): {solved} vs {brute}");
    }
    for case in 0..100 {
        let n = 1 + case % 40;
        let a = random_points(n, 1, &mut rng);
        let b = random_points(n, 1, &mut rng);
        let fast = wasserstein_points(&a, &b).unwrap();
        let solved = assignment_wasserstein(&a, &b).unwrap();
        assert_eq!(fast.to_bits(), solved.to_bits(), "1-D case {case} (n={n}): {fast} vs {solved}");
    }
    println!("ACCEPTANCE 4 (Wasserstein vs factorial oracle ×100, 1-D fast path ×100): PASS");
}

// -------------------------------------------------------------------------
// Criterion 5 — likelihood oracles

/// Plain dense multivariate-normal log density, written independently of the
/// library's banded/conditional evaluators.
fn dense_mvn_logpdf(cov: &[Vec<f64>], y: &[f64]) -> f64 {
    let n = y.len();
    // Unblocked Cholesky cov = L·Lᵀ.
    let mut l = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = cov[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                assert!(s > 0.0, "oracle covariance not positive definite");
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    // Forward solve L·z = y.
    let mut z = vec![0.0f64; n];
    let mut logdet_half = 0.0;
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s -= l[i][k] * z[k];
        }
        z[i] = s / l[i][i];
        logdet_half += l[i][i].ln();
    }
    let quad: f64 = z.iter().map(|v| v * v).sum();
    -0.5 * (n as f64) * (2.0 * std::f64::consts::PI).ln() - logdet_half - 0.5 * quad
}

#[test]
fn criterion_5_likelihood_oracles() {
    let mut rng = rng_from_seed(205);
    let m = 50;

    let mut worst_ar2 = 0.0f64;
    for _ in 0..25 {
        let theta = PriorSpec::new(ModelId::Ar2).sample(&mut rng);
        let y = simulate(&theta, m, &mut rng).unwrap();
        let cov: Vec<Vec<f64>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| ar2::stationary_autocov(theta.values[0], theta.values[1], i.abs_diff(j)))
                    .collect()
            })
            .collect();
        let diff = (ar2_loglik(&theta, &y) - dense_mvn_logpdf(&cov, &y)).abs();
        assert!(diff < 1e-8, "ar2 disagreement {diff}");
        worst_ar2 = worst_ar2.max(diff);
    }

    let mut worst_ma2 = 0.0f64;
    for _ in 0..25 {
        let theta = PriorSpec::new(ModelId::Ma2).sample(&mut rng);
        let y = simulate(&theta, m, &mut rng).unwrap();
        let cov: Vec<Vec<f64>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        ma2::theoretical_autocov(
                            theta.values[0],
                            theta.values[1],
                            ma2::DEFAULT_SIGMA_EPS,
                            i.abs_diff(j),
                        )
                    })
                    .collect()
            })
            .collect();
        let diff = (ma2_loglik(&theta, &y, ma2::DEFAULT_SIGMA_EPS) - dense_mvn_logpdf(&cov, &y)).abs();
        assert!(diff < 1e-8, "ma2 disagreement {diff}");
        worst_ma2 = worst_ma2.max(diff);
    }

    // Change of variables: at x = Q(z), the density satisfies
    // log f(x) = log φ(z) − log Q'(z).
    let mut worst_gk = 0.0f64;
    for _ in 0..20 {
        let theta = PriorSpec::new(ModelId::Gandk).sample(&mut rng);
        let &[a, b, g, k] = &theta.values[..] else { unreachable!() };
        for z in [-2.5, -1.0, -0.25, 0.0, 0.5, 1.5, 2.5] {
            let x = penabc::models::gandk::quantile_fn(a, b, g, k, penabc::models::gandk::DEFAULT_C, z);
            let h = 1e-6;
            let qp = (penabc::models::gandk::quantile_fn(a, b, g, k, penabc::models::gandk::DEFAULT_C, z + h)
                - penabc::models::gandk::quantile_fn(a, b, g, k, penabc::models::gandk::DEFAULT_C, z - h))
                / (2.0 * h);
            let want = -0.5 * ((2.0 * std::f64::consts::PI).ln() + z * z) - qp.ln();
            let diff = (gandk_logpdf(&theta, x, penabc::models::gandk::DEFAULT_C) - want).abs();
            assert!(diff < 1e-5, "g-and-k disagreement {diff} at z={z}, theta={:?}", theta.values);
            worst_gk = worst_gk.max(diff);
        }
    }

    println!(
        "ACCEPTANCE 5 (likelihood oracles: ar2 {worst_ar2:.2e}, ma2 {worst_ma2:.2e}, g-and-k {worst_gk:.2e}): PASS"
    );
}

// -------------------------------------------------------------------------
// Criterion 6 — ABC mechanics

fn table_checksum(table: &ReferenceTable) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    let eat = |h: &mut u64, v: f64| {
        *h ^= v.to_bits();
        *h = h.wrapping_mul(0x100000001b3);
    };
    for p in &table.params {
        for &v in &p.values {
            eat(&mut h, v);
        }
    }
    for s in &table.series {
        for &v in s {
            eat(&mut h, v);
        }
    }
    h
}

#[test]
fn criterion_6_abc_mechanics() {
    // Retention arithmetic at the two published settings.
    let cfg_a = AbcConfig { n_tilde: 100_000, percentile_x: 0.1, metric_weights: vec![1.0; 5] };
    assert_eq!(cfg_a.retention_count(), 100);
    let cfg_b = AbcConfig { n_tilde: 500_000, percentile_x: 0.02, metric_weights: vec![1.0; 5] };
    assert_eq!(cfg_b.retention_count(), 100);

    let truth = ground_truth(ModelId::Ar2);
    let prior = PriorSpec::new(ModelId::Ar2);
    let handpicked = |y: &[f64]| penabc::models::handpicked_summaries(ModelId::Ar2, y);

    // Real rejection at Ñ = 10⁵, x = 0.1, M = 100.
    let mut rng = rng_from_seed(206);
    let y_obs = simulate(&truth, 100, &mut rng).unwrap();
    let s_obs = handpicked(&y_obs).unwrap();
    let mut table = build_reference_table(ModelId::Ar2, &prior, 100, 100_000, &mut rng).unwrap();
    summarize_table(&mut table, handpicked).unwrap();
    let posterior = rejection_sample(&table, &s_obs, 0.1, &cfg_a.metric_weights).unwrap();
    assert_eq!(posterior.draws.len(), 100);
    assert!(posterior.distances.windows(2).all(|w| w[0] <= w[1]), "distances sorted ascending");
    assert!(posterior
        .draws
        .iter()
        .all(|p| ar2::in_triangle(p.values[0], p.values[1])));

    // Real rejection at Ñ = 5·10⁵, x = 0.02 (shorter series, same count rule).
    let y_obs_b = simulate(&truth, 10, &mut rng).unwrap();
    let s_obs_b = handpicked(&y_obs_b).unwrap();
    let mut table_b = build_reference_table(ModelId::Ar2, &prior, 10, 500_000, &mut rng).unwrap();
    summarize_table(&mut table_b, handpicked).unwrap();
    let posterior_b = rejection_sample(&table_b, &s_obs_b, 0.02, &cfg_b.metric_weights).unwrap();
    assert_eq!(posterior_b.draws.len(), 100);
    drop(table_b);

    // Recycling: one table re-summarized under three methods, bitwise intact,
    // and the handpicked rejection reproduces exactly afterwards.
    let mut small = build_reference_table(ModelId::Ar2, &prior, 100, 20_000, &mut rng).unwrap();
    let before = table_checksum(&small);
    summarize_table(&mut small, handpicked).unwrap();
    let first = rejection_sample(&small, &s_obs, 0.1, &cfg_a.metric_weights).unwrap();
    assert_eq!(table_checksum(&small), before, "handpicked summaries touched the table");

    let mlp_spec = MlpSpec::relu_stack(&[100, 16, 2]);
    let mlp = TrainedNet::Mlp {
        spec: mlp_spec.clone(),
        weights: init_weights(&mlp_spec, &mut rng_from_seed(61)),
    };
    summarize_table(&mut small, |y| mlp.summarize(ModelId::Ar2, SummaryMethod::MlpSmall, y)).unwrap();
    let mlp_posterior = rejection_sample(
        &small,
        &mlp.summarize(ModelId::Ar2, SummaryMethod::MlpSmall, &y_obs).unwrap(),
        0.1,
        &[1.0, 1.0],
    )
    .unwrap();
    assert_eq!(mlp_posterior.draws.len(), 20);
    assert_eq!(table_checksum(&small), before, "network summaries touched the table");

    let pen = {
        let spec = PenSpec {
            d: 0,
            inner: MlpSpec::relu_stack(&[1, 8, 4]),
            outer: MlpSpec::relu_stack(&[4, 8, 2]),
            extra_dim: 0,
        };
        let weights = init_pen_weights(&spec, 100, &mut rng_from_seed(62));
        TrainedNet::Pen { spec, weights }
    };
    summarize_table(&mut small, |y| pen.summarize(ModelId::Ar2, SummaryMethod::Pen { d: 0 }, y)).unwrap();
    assert_eq!(table_checksum(&small), before, "PEN summaries touched the table");

    summarize_table(&mut small, handpicked).unwrap();
    let second = rejection_sample(&small, &s_obs, 0.1, &cfg_a.metric_weights).unwrap();
    assert_eq!(first.draws, second.draws, "recycled table must reproduce the posterior bitwise");
    assert_eq!(first.distances, second.distances);

    println!("ACCEPTANCE 6 (ABC mechanics: retention 100/100, recycling bitwise): PASS");
}
