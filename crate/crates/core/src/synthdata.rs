//! Synthetic two-view instances and preprocessing helpers for real data.
//!
//! Rows of `X` follow an AR(1) recursion across columns,
//! `x_{i,j+1} = θ·x_{ij} + √(1−θ²)·c`, with a fresh standard normal
//! innovation `c` per entry, so adjacent columns have correlation `θ`. The
//! second view is `Z = X + 0.01·Λ` with `Λ` standard normal. Each block of the
//! ground truth has `sⱼ` standard-normal entries on a uniformly drawn support.
//!
//! Responses:
//! * logistic: `P(yᵢ = 0) = ½[σ(⟨xᵢ,β₁⟩) + σ(⟨zᵢ,β₂⟩)]` (orientation can be
//!   flipped with [`SynthSpec::flip_labels`]);
//! * linear: `y = (Xβ₁ + Zβ₂)/2`, noiseless.
//!
//! All randomness comes from a single ChaCha20 stream seeded with
//! [`SynthSpec::seed`], consumed in this order: `X` row by row, `Λ` row by
//! row, support and values of `β₁`, support and values of `β₂`, then one
//! uniform per label.

use ndarray::{Array1, Array2, Axis};
use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SclError};
use crate::model::{sigmoid, Iterate, LossKind, ProblemData};

/// Parameters of a synthetic instance; both views have `p` columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n: usize,
    pub p: usize,
    pub s1: usize,
    pub s2: usize,
    /// Adjacent-column correlation, in `[0, 1)`.
    pub theta: f64,
    pub loss: LossKind,
    pub seed: u64,
    /// Draw `y = 1` (instead of `y = 0`) with the mixture probability.
    #[serde(default)]
    pub flip_labels: bool,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.p == 0 {
            return Err(SclError::InvalidArgument("n and p must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.theta) {
            return Err(SclError::InvalidArgument(format!(
                "theta must lie in [0, 1), got {}",
                self.theta
            )));
        }
        if self.s1 > self.p || self.s2 > self.p {
            return Err(SclError::InvalidArgument(format!(
                "sparsity ({}, {}) exceeds p = {}",
                self.s1, self.s2, self.p
            )));
        }
        Ok(())
    }
}

/// Coefficients the responses were generated from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub beta1: Vec<f64>,
    pub beta2: Vec<f64>,
    pub support1: Vec<usize>,
    pub support2: Vec<usize>,
}

impl GroundTruth {
    pub fn to_iterate(&self) -> Iterate {
        Iterate::new(Array1::from(self.beta1.clone()), Array1::from(self.beta2.clone()))
    }
}

fn sparse_coefficients(rng: &mut ChaCha20Rng, p: usize, s: usize) -> (Vec<f64>, Vec<usize>) {
    let mut support = sample(rng, p, s).into_vec();
    support.sort_unstable();
    let mut beta = vec![0.0; p];
    for &j in &support {
        let mut v: f64 = rng.sample(StandardNormal);
        // Keep the support exact; a zero draw has probability zero but is
        // representable.
        while v == 0.0 {
            v = rng.sample(StandardNormal);
        }
        beta[j] = v;
    }
    (beta, support)
}

/// Draws an instance and the coefficients behind it.
pub fn generate(spec: &SynthSpec) -> Result<(ProblemData, GroundTruth)> {
    spec.validate()?;
    let (n, p, theta) = (spec.n, spec.p, spec.theta);
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let innovation = (1.0 - theta * theta).sqrt();

    let mut x = Array2::zeros((n, p));
    for i in 0..n {
        x[[i, 0]] = rng.sample(StandardNormal);
        for j in 1..p {
            let c: f64 = rng.sample(StandardNormal);
            x[[i, j]] = theta * x[[i, j - 1]] + innovation * c;
        }
    }
    let mut z = x.clone();
    for v in z.iter_mut() {
        let l: f64 = rng.sample(StandardNormal);
        *v += 0.01 * l;
    }

    let (beta1, support1) = sparse_coefficients(&mut rng, p, spec.s1);
    let (beta2, support2) = sparse_coefficients(&mut rng, p, spec.s2);
    let xb = x.dot(&Array1::from(beta1.clone()));
    let zb = z.dot(&Array1::from(beta2.clone()));

    let y: Array1<f64> = match spec.loss {
        LossKind::Linear => (&xb + &zb) / 2.0,
        LossKind::Logistic => xb
            .iter()
            .zip(zb.iter())
            .map(|(&u, &v)| {
                let prob = 0.5 * (sigmoid(u) + sigmoid(v));
                let hit = rng.random::<f64>() < prob;
                match (hit, spec.flip_labels) {
                    (true, false) | (false, true) => 0.0,
                    _ => 1.0,
                }
            })
            .collect(),
    };

    let data = ProblemData::new(x, z, y, spec.loss)?;
    Ok((
        data,
        GroundTruth {
            beta1,
            beta2,
            support1,
            support2,
        },
    ))
}

/// Maps each column affinely onto `[−1, 1]`; constant columns become zero.
pub fn scale_features(matrix: &Array2<f64>) -> Array2<f64> {
    let mut out = matrix.clone();
    for mut col in out.axis_iter_mut(Axis(1)) {
        let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi > lo {
            col.mapv_inplace(|v| 2.0 * (v - lo) / (hi - lo) - 1.0);
        } else {
            col.fill(0.0);
        }
    }
    out
}

/// Training and test row indices, each ascending.
pub fn split_indices(n: usize, n_test: usize, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if n_test == 0 || n_test >= n {
        return Err(SclError::InvalidArgument(format!(
            "test size must lie in (0, {n}), got {n_test}"
        )));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut test = order[..n_test].to_vec();
    let mut train = order[n_test..].to_vec();
    test.sort_unstable();
    train.sort_unstable();
    Ok((train, test))
}

/// Random disjoint row partition into `(train, test)` with `n_test` test rows.
pub fn random_split(data: &ProblemData, n_test: usize, seed: u64) -> Result<(ProblemData, ProblemData)> {
    let (train, test) = split_indices(data.n(), n_test, seed)?;
    Ok((data.select_rows(&train)?, data.select_rows(&test)?))
}
