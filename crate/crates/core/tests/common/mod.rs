#![allow(dead_code)]

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scl::{generate, Iterate, LossKind, ProblemData, SparsityBudget, SynthSpec, WeightConfig};

pub fn synth(n: usize, p: usize, s: usize, theta: f64, loss: LossKind, seed: u64) -> (ProblemData, Iterate) {
    let spec = SynthSpec {
        n,
        p,
        s1: s,
        s2: s,
        theta,
        loss,
        seed,
        flip_labels: false,
    };
    let (data, truth) = generate(&spec).unwrap();
    (data, truth.to_iterate())
}

pub fn budget_and_weights(s1: usize, s2: usize) -> (SparsityBudget, WeightConfig) {
    let b = SparsityBudget::new(s1, s2).unwrap();
    (b, WeightConfig::from_budget(b))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| rng.sample::<f64, _>(rand_distr::StandardNormal))
}

pub fn gaussian_vector(rng: &mut ChaCha8Rng, len: usize, scale: f64) -> Array1<f64> {
    Array1::from_shape_fn(len, |_| scale * rng.sample::<f64, _>(rand_distr::StandardNormal))
}

/// Random problem with independent Gaussian views; binary labels for the
/// logistic loss, Gaussian responses otherwise.
pub fn random_problem(rng: &mut ChaCha8Rng, n: usize, p1: usize, p2: usize, loss: LossKind) -> ProblemData {
    let x = gaussian_matrix(rng, n, p1);
    let z = gaussian_matrix(rng, n, p2);
    let y = match loss {
        LossKind::Logistic => Array1::from_shape_fn(n, |_| f64::from(rng.random::<bool>() as u8)),
        LossKind::Linear => gaussian_vector(rng, n, 1.0),
    };
    ProblemData::new(x, z, y, loss).unwrap()
}

pub fn random_weights(rng: &mut ChaCha8Rng) -> WeightConfig {
    WeightConfig::new(
        rng.random_range(0.1..2.0),
        rng.random_range(0.1..2.0),
        rng.random_range(0.01..1.0),
    )
    .unwrap()
}

pub fn stacked(beta: &Iterate) -> Vec<f64> {
    beta.stacked().to_vec()
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn diff_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Row-by-row predictions `(Xβ₁, Zβ₂)`.
pub fn loop_predictions(data: &ProblemData, beta: &Iterate) -> (Vec<f64>, Vec<f64>) {
    let mut xb = vec![0.0; data.n()];
    let mut zb = vec![0.0; data.n()];
    for i in 0..data.n() {
        for j in 0..data.p1() {
            xb[i] += data.x()[[i, j]] * beta.beta1()[j];
        }
        for j in 0..data.p2() {
            zb[i] += data.z()[[i, j]] * beta.beta2()[j];
        }
    }
    (xb, zb)
}

pub fn loop_cer(data: &ProblemData, beta: &Iterate) -> f64 {
    let (xb, zb) = loop_predictions(data, beta);
    let mut wrong = 0usize;
    for i in 0..data.n() {
        let y = data.y()[i];
        if (if xb[i] > 0.0 { 1.0 } else { 0.0 }) != y {
            wrong += 1;
        }
        if (if zb[i] > 0.0 { 1.0 } else { 0.0 }) != y {
            wrong += 1;
        }
    }
    wrong as f64 / data.n() as f64
}

pub fn loop_ccv(data: &ProblemData, beta: &Iterate) -> f64 {
    let (xb, zb) = loop_predictions(data, beta);
    let mut sq = 0.0;
    for i in 0..data.n() {
        sq += (xb[i] - zb[i]) * (xb[i] - zb[i]);
    }
    sq.sqrt() / data.n() as f64
}

pub fn loop_mse(data: &ProblemData, beta: &Iterate) -> f64 {
    let (xb, zb) = loop_predictions(data, beta);
    let (mut a, mut b) = (0.0, 0.0);
    for i in 0..data.n() {
        let y = data.y()[i];
        a += (y - xb[i]) * (y - xb[i]);
        b += (y - zb[i]) * (y - zb[i]);
    }
    (a.sqrt() + b.sqrt()) / data.n() as f64
}

/// Random iterate with exactly `s1` and `s2` nonzeros.
pub fn random_sparse(rng: &mut ChaCha8Rng, p1: usize, p2: usize, s1: usize, s2: usize, scale: f64) -> Iterate {
    let mut block = |p: usize, s: usize| {
        let mut v = Array1::zeros(p);
        for j in rand::seq::index::sample(rng, p, s) {
            v[j] = scale * rng.sample::<f64, _>(rand_distr::StandardNormal);
        }
        v
    };
    let b1 = block(p1, s1);
    let b2 = block(p2, s2);
    Iterate::new(b1, b2)
}
