mod common;

use approx::assert_relative_eq;
use nalgebra::DMatrix;
use ndarray::{array, Array1, Array2};
use proptest::prelude::*;
use rand::Rng;
use scl::model::{gradient, lipschitz_hessian_constant, objective, restricted_hessian, smoothness_constant};
use scl::oracle::{
    dense_gradient, dense_hessian, dense_objective, dense_smoothness_constant, is_s_regular, joint_design,
    restricted_convexity_constant,
};
use scl::{Iterate, LossKind, ProblemData, SparsityBudget, WeightConfig};

use common::*;

fn unit_weights() -> WeightConfig {
    WeightConfig::new(1.0, 1.0, 1.0).unwrap()
}

#[test]
fn objective_at_zero() {
    let mut r = rng(1);
    let data = random_problem(&mut r, 9, 4, 3, LossKind::Logistic);
    let w = WeightConfig::new(0.7, 1.3, 0.2).unwrap();
    let f = objective(&data, &w, &Iterate::zeros(4, 3)).unwrap();
    assert_relative_eq!(f, 2.0_f64.ln() * 2.0, max_relative = 1e-15);

    let lin = ProblemData::new(data.x().clone(), data.z().clone(), Array1::zeros(9), LossKind::Linear).unwrap();
    assert_eq!(objective(&lin, &w, &Iterate::zeros(4, 3)).unwrap(), 0.0);
    assert!(gradient(&lin, &w, &Iterate::zeros(4, 3))
        .unwrap()
        .iter()
        .all(|&g| g == 0.0));
}

#[test]
fn logistic_gradient_at_zero() {
    let mut r = rng(2);
    let data = random_problem(&mut r, 11, 3, 4, LossKind::Logistic);
    let w = WeightConfig::new(0.4, 1.7, 0.3).unwrap();
    let g = gradient(&data, &w, &Iterate::zeros(3, 4)).unwrap();
    let resid = data.y().mapv(|y| 0.5 - y);
    let n = 11.0;
    let g1 = data.x().t().dot(&resid) * (0.4 / n);
    let g2 = data.z().t().dot(&resid) * (1.7 / n);
    for j in 0..3 {
        assert_relative_eq!(g[j], g1[j], max_relative = 1e-12, epsilon = 1e-15);
    }
    for j in 0..4 {
        assert_relative_eq!(g[3 + j], g2[j], max_relative = 1e-12, epsilon = 1e-15);
    }
}

#[test]
fn matches_sample_by_sample_oracle() {
    let mut r = rng(3);
    for loss in [LossKind::Logistic, LossKind::Linear] {
        for _ in 0..50 {
            let data = random_problem(&mut r, 5, 3, 3, loss);
            let w = random_weights(&mut r);
            let beta = Iterate::new(gaussian_vector(&mut r, 3, 1.0), gaussian_vector(&mut r, 3, 1.0));
            let s = stacked(&beta);
            assert_relative_eq!(
                objective(&data, &w, &beta).unwrap(),
                dense_objective(&data, &w, &s),
                max_relative = 1e-12
            );
            let g = gradient(&data, &w, &beta).unwrap();
            let og = dense_gradient(&data, &w, &s);
            assert!(diff_norm(&g.to_vec(), &og) <= 1e-12 * norm(&og).max(1.0));
            let full: Vec<usize> = (0..6).collect();
            let h = restricted_hessian(&data, &w, &beta, &full).unwrap();
            let oh = dense_hessian(&data, &w, &s);
            assert!((&h - &oh).iter().all(|d| d.abs() <= 1e-12));
        }
    }
}

#[test]
fn restricted_hessian_is_principal_submatrix() {
    let mut r = rng(4);
    let data = random_problem(&mut r, 12, 5, 4, LossKind::Logistic);
    let w = random_weights(&mut r);
    let beta = Iterate::new(gaussian_vector(&mut r, 5, 0.5), gaussian_vector(&mut r, 4, 0.5));
    let dense = dense_hessian(&data, &w, &stacked(&beta));
    let support = vec![0, 3, 5, 8];
    let h = restricted_hessian(&data, &w, &beta, &support).unwrap();
    for (a, &i) in support.iter().enumerate() {
        for (b, &j) in support.iter().enumerate() {
            assert_relative_eq!(h[[a, b]], dense[[i, j]], max_relative = 1e-12, epsilon = 1e-15);
            assert_eq!(h[[a, b]], h[[b, a]]);
        }
    }
    assert!(restricted_hessian(&data, &w, &beta, &[9]).is_err());
}

#[test]
fn linear_hessian_does_not_depend_on_beta() {
    let mut r = rng(5);
    let data = random_problem(&mut r, 10, 4, 4, LossKind::Linear);
    let w = random_weights(&mut r);
    let support = vec![1, 2, 6];
    let b1 = Iterate::new(gaussian_vector(&mut r, 4, 1.0), gaussian_vector(&mut r, 4, 1.0));
    let h1 = restricted_hessian(&data, &w, &b1, &support).unwrap();
    let h0 = restricted_hessian(&data, &w, &Iterate::zeros(4, 4), &support).unwrap();
    assert_eq!(h0, h1);
}

#[test]
fn logistic_hessian_at_zero_is_quarter_weighted_block() {
    let mut r = rng(6);
    let data = random_problem(&mut r, 10, 3, 3, LossKind::Logistic);
    let w = random_weights(&mut r);
    let (a, b, c, n) = (w.a(), w.b(), w.c(), 10.0);
    let xtx = data.x().t().dot(data.x());
    let ztz = data.z().t().dot(data.z());
    let xtz = data.x().t().dot(data.z());
    let mut expect = Array2::zeros((6, 6));
    for i in 0..3 {
        for j in 0..3 {
            expect[[i, j]] = (a / 4.0 + c) * xtx[[i, j]] / n;
            expect[[3 + i, 3 + j]] = (b / 4.0 + c) * ztz[[i, j]] / n;
            expect[[i, 3 + j]] = -c * xtz[[i, j]] / n;
            expect[[3 + j, i]] = -c * xtz[[i, j]] / n;
        }
    }
    let h = restricted_hessian(&data, &w, &Iterate::zeros(3, 3), &(0..6).collect::<Vec<_>>()).unwrap();
    for (u, v) in h.iter().zip(expect.iter()) {
        assert_relative_eq!(*u, *v, max_relative = 1e-12, epsilon = 1e-15);
    }
}

#[test]
fn smoothness_on_identity_views() {
    let n = 5;
    let eye = Array2::eye(n);
    let data = ProblemData::new(eye.clone(), eye, Array1::zeros(n), LossKind::Linear).unwrap();
    let lf = smoothness_constant(&data, &unit_weights()).unwrap();
    assert_relative_eq!(lf, 3.0 / n as f64, max_relative = 1e-6);
    assert_relative_eq!(
        dense_smoothness_constant(&data, &unit_weights()),
        3.0 / n as f64,
        max_relative = 1e-12
    );
}

#[test]
fn smoothness_matches_dense_eigensolve_and_scales_quadratically() {
    let mut r = rng(7);
    for loss in [LossKind::Logistic, LossKind::Linear] {
        for _ in 0..20 {
            let data = random_problem(&mut r, 6, 4, 4, loss);
            let w = random_weights(&mut r);
            let lf = smoothness_constant(&data, &w).unwrap();
            assert_relative_eq!(lf, dense_smoothness_constant(&data, &w), max_relative = 1e-6);
        }
    }
    let data = random_problem(&mut r, 8, 5, 3, LossKind::Linear);
    let w = random_weights(&mut r);
    let scaled = ProblemData::new(data.x() * 3.0, data.z() * 3.0, data.y().clone(), LossKind::Linear).unwrap();
    assert_relative_eq!(
        smoothness_constant(&scaled, &w).unwrap(),
        9.0 * smoothness_constant(&data, &w).unwrap(),
        max_relative = 1e-6
    );
}

#[test]
fn hessian_lipschitz_constant() {
    let n = 4;
    let eye = Array2::eye(n);
    let logistic = ProblemData::new(eye.clone(), eye.clone(), array![0.0, 1.0, 1.0, 0.0], LossKind::Logistic).unwrap();
    let cf = lipschitz_hessian_constant(&logistic, &unit_weights()).unwrap();
    assert_relative_eq!(cf, 3.0 * 2.0_f64.sqrt() / n as f64, max_relative = 1e-6);

    let linear = ProblemData::new(eye.clone(), eye, Array1::zeros(n), LossKind::Linear).unwrap();
    assert_eq!(lipschitz_hessian_constant(&linear, &unit_weights()).unwrap(), 0.0);

    let mut r = rng(8);
    let data = random_problem(&mut r, 10, 3, 3, LossKind::Logistic);
    let w = WeightConfig::new(1.0, 1e-3, 0.5).unwrap();
    let w2 = WeightConfig::new(2.0, 1e-3, 0.5).unwrap();
    let c1 = lipschitz_hessian_constant(&data, &w).unwrap();
    let c2 = lipschitz_hessian_constant(&data, &w2).unwrap();
    assert_relative_eq!(c2, 2.0 * c1, max_relative = 1e-6);
}

#[test]
fn rejects_invalid_data() {
    let x = Array2::zeros((3, 2));
    assert!(ProblemData::new(x.clone(), Array2::zeros((2, 2)), Array1::zeros(3), LossKind::Linear).is_err());
    assert!(ProblemData::new(x.clone(), x.clone(), array![0.0, 0.5, 1.0], LossKind::Logistic).is_err());
    assert!(ProblemData::new(x.clone(), x.clone(), array![0.0, f64::NAN, 1.0], LossKind::Linear).is_err());
    assert!(ProblemData::new(
        Array2::zeros((0, 2)),
        Array2::zeros((0, 2)),
        Array1::zeros(0),
        LossKind::Linear
    )
    .is_err());
    assert!(WeightConfig::new(1.0, 0.0, 1.0).is_err());
    assert!(SparsityBudget::new(0, 1).is_err());
    let data = ProblemData::new(x.clone(), x, Array1::zeros(3), LossKind::Linear).unwrap();
    assert!(objective(&data, &unit_weights(), &Iterate::zeros(3, 2)).is_err());
    assert!(SparsityBudget::new(3, 1).unwrap().check(2, 2).is_err());
}

#[test]
fn stable_logistic_terms_at_extreme_margins() {
    let x = array![[800.0], [-800.0]];
    let data = ProblemData::new(x.clone(), x, array![0.0, 1.0], LossKind::Logistic).unwrap();
    let beta = Iterate::new(array![1.0], array![1.0]);
    let f = objective(&data, &unit_weights(), &beta).unwrap();
    assert!(f.is_finite() && f > 0.0);
    assert!(gradient(&data, &unit_weights(), &beta)
        .unwrap()
        .iter()
        .all(|g| g.is_finite()));
}

fn spectral_norm(m: &Array2<f64>) -> f64 {
    let d = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[[i, j]]);
    d.symmetric_eigenvalues().iter().fold(0.0_f64, |a, v| a.max(v.abs()))
}

#[test]
fn restricted_hessian_respects_convexity_bound_when_s_regular() {
    let mut r = rng(9);
    let (data, _) = synth(30, 5, 2, 0.5, LossKind::Linear, 9);
    let budget = SparsityBudget::new(2, 2).unwrap();
    let w = WeightConfig::from_budget(budget);
    assert!(is_s_regular(&joint_design(&data), 4).unwrap());
    let lf = restricted_convexity_constant(&data, &w, budget).unwrap().value;
    assert!(lf > 0.0);
    for _ in 0..50 {
        let k = r.random_range(1..=4);
        let mut support = rand::seq::index::sample(&mut r, 10, k).into_vec();
        support.sort_unstable();
        let h = restricted_hessian(&data, &w, &Iterate::zeros(5, 5), &support).unwrap();
        let d = DMatrix::from_fn(k, k, |i, j| h[[i, j]]);
        let lo = d.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        assert!(lo >= lf - 1e-8, "λ_min {lo} below l_f {lf}");
    }
}

fn instance(loss: LossKind, seed: u64) -> (ProblemData, WeightConfig, f64) {
    let mut r = rng(seed);
    let data = random_problem(&mut r, 8, 3, 3, loss);
    let w = random_weights(&mut r);
    let lf = dense_smoothness_constant(&data, &w);
    (data, w, lf)
}

fn point(v: &[f64]) -> Iterate {
    Iterate::from_stacked(Array1::from(v.to_vec()).view(), 3).unwrap()
}

fn vec6() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-2.0..2.0_f64, 6)
}

fn loss_strategy() -> impl Strategy<Value = LossKind> {
    prop_oneof![Just(LossKind::Logistic), Just(LossKind::Linear)]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, ..ProptestConfig::default() })]

    #[test]
    fn descent_lemma(loss in loss_strategy(), seed in 0u64..20, b in vec6(), d in vec6()) {
        let (data, w, lf) = instance(loss, seed);
        let f0 = objective(&data, &w, &point(&b)).unwrap();
        let g = gradient(&data, &w, &point(&b)).unwrap();
        let moved: Vec<f64> = b.iter().zip(&d).map(|(x, y)| x + y).collect();
        let f1 = objective(&data, &w, &point(&moved)).unwrap();
        let lin: f64 = g.iter().zip(&d).map(|(x, y)| x * y).sum();
        let dd: f64 = d.iter().map(|x| x * x).sum();
        prop_assert!(f1 <= f0 + lin + 0.5 * lf * dd + 1e-10 * (1.0 + f0.abs()));
    }

    #[test]
    fn first_order_expansion(loss in loss_strategy(), seed in 0u64..20, b in vec6(), d in vec6()) {
        let (data, w, lf) = instance(loss, seed);
        let dn = norm(&d);
        prop_assume!(dn > 1e-3);
        let unit: Vec<f64> = d.iter().map(|x| x / dn).collect();
        let f0 = objective(&data, &w, &point(&b)).unwrap();
        let g = gradient(&data, &w, &point(&b)).unwrap();
        let slope: f64 = g.iter().zip(&unit).map(|(x, y)| x * y).sum();
        for h in [1e-2, 1e-3] {
            let moved: Vec<f64> = b.iter().zip(&unit).map(|(x, y)| x + h * y).collect();
            let f1 = objective(&data, &w, &point(&moved)).unwrap();
            prop_assert!((f1 - f0 - h * slope).abs() <= 0.5 * lf * h * h + 1e-10);
        }
    }

    #[test]
    fn convexity(loss in loss_strategy(), seed in 0u64..20, b in vec6(), c in vec6()) {
        let (data, w, _) = instance(loss, seed);
        let fb = objective(&data, &w, &point(&b)).unwrap();
        let fc = objective(&data, &w, &point(&c)).unwrap();
        for lam in [0.25, 0.5, 0.75] {
            let mix: Vec<f64> = b.iter().zip(&c).map(|(x, y)| lam * x + (1.0 - lam) * y).collect();
            let fm = objective(&data, &w, &point(&mix)).unwrap();
            prop_assert!(fm <= lam * fb + (1.0 - lam) * fc + 1e-12 * (1.0 + fb.abs() + fc.abs()));
        }
    }

    #[test]
    fn logistic_hessian_lipschitz(seed in 0u64..20, b in vec6(), c in vec6()) {
        let (data, w, _) = instance(LossKind::Logistic, seed);
        let cf = lipschitz_hessian_constant(&data, &w).unwrap();
        let diff = dense_hessian(&data, &w, &b) - dense_hessian(&data, &w, &c);
        prop_assert!(spectral_norm(&diff) <= cf * diff_norm(&b, &c) + 1e-12);
    }
}
