mod common;

use scl::model::objective;
use scl::oracle::dense_objective;
use scl::synthdata::random_split;
use scl::{generate, LossKind, SparsityBudget, SynthSpec, WeightConfig};

use common::*;

fn spec(n: usize, p: usize, theta: f64, loss: LossKind, seed: u64) -> SynthSpec {
    SynthSpec {
        n,
        p,
        s1: 3,
        s2: 3,
        theta,
        loss,
        seed,
        flip_labels: false,
    }
}

fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

#[test]
fn adjacent_column_correlation_matches_theta() {
    for theta in [0.0, 0.5, 0.9] {
        let (data, _) = generate(&spec(10_000, 6, theta, LossKind::Linear, 700)).unwrap();
        for j in 0..5 {
            let a = data.x().column(j).to_vec();
            let b = data.x().column(j + 1).to_vec();
            let rho = correlation(&a, &b);
            assert!((rho - theta).abs() <= 0.05, "θ = {theta}, column {j}: {rho}");
        }
        // Unit marginal variance in every column.
        for j in 0..6 {
            let c = data.x().column(j);
            let var = c.iter().map(|v| v * v).sum::<f64>() / c.len() as f64;
            assert!((var - 1.0).abs() <= 0.05);
        }
    }
}

#[test]
fn second_view_is_a_small_perturbation() {
    let (data, _) = generate(&spec(2_000, 10, 0.5, LossKind::Linear, 701)).unwrap();
    let d = data.z() - data.x();
    let sd = (d.iter().map(|v| v * v).sum::<f64>() / d.len() as f64).sqrt();
    assert!((sd - 0.01).abs() <= 0.001);
}

#[test]
fn objective_at_truth_matches_sample_loop() {
    for loss in [LossKind::Linear, LossKind::Logistic] {
        let (data, truth) = generate(&spec(80, 15, 0.3, loss, 702)).unwrap();
        let w = WeightConfig::from_budget(SparsityBudget::new(3, 3).unwrap());
        let it = truth.to_iterate();
        let fast = objective(&data, &w, &it).unwrap();
        let slow = dense_objective(&data, &w, &stacked(&it));
        assert!((fast - slow).abs() <= 1e-12 * slow.abs().max(1.0));
        // Linear responses are the average of the two views, so each loss
        // term equals a quarter of the coupling term.
        if loss == LossKind::Linear {
            let xb = data.x().dot(it.beta1());
            let zb = data.z().dot(it.beta2());
            let gap = (&xb - &zb).mapv(|v| v * v).sum();
            let expected = (w.a() + w.b()) * gap / 8.0 + w.c() * gap / 2.0;
            assert!((fast - expected / data.n() as f64).abs() <= 1e-10 * fast.max(1.0));
        }
    }
}

#[test]
fn logistic_labels_are_binary_and_balanced() {
    let (data, _) = generate(&spec(5_000, 10, 0.5, LossKind::Logistic, 703)).unwrap();
    assert!(data.y().iter().all(|&v| v == 0.0 || v == 1.0));
    let ones = data.y().sum() / data.n() as f64;
    assert!((ones - 0.5).abs() <= 0.05);
}

#[test]
fn random_split_keeps_rows_intact() {
    let (data, _) = generate(&spec(46, 8, 0.2, LossKind::Linear, 704)).unwrap();
    let (train, test) = random_split(&data, 10, 9).unwrap();
    assert_eq!((train.n(), test.n()), (36, 10));
    // Every test row appears verbatim in the original data.
    for i in 0..test.n() {
        let found = (0..data.n()).any(|k| data.x().row(k) == test.x().row(i) && data.y()[k] == test.y()[i]);
        assert!(found);
    }
}

#[test]
fn different_seeds_give_different_supports() {
    let supports: Vec<_> = (0..10)
        .map(|s| {
            generate(&spec(10, 50, 0.0, LossKind::Linear, 710 + s))
                .unwrap()
                .1
                .support1
        })
        .collect();
    let distinct = supports.iter().collect::<std::collections::HashSet<_>>().len();
    assert!(distinct >= 9);
}
