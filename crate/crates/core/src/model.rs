//! Problem instance and the smooth part of the two-view objective
//!
//! ```text
//! f(β₁, β₂) = (1/n) [ a·ℓ(β₁; X, y) + b·ℓ(β₂; Z, y) + (c/2)·‖Xβ₁ − Zβ₂‖² ]
//! ```
//!
//! with `ℓ` either the logistic loss `Σ log(1 + exp⟨xᵢ,β⟩) − yᵢ⟨xᵢ,β⟩` or the
//! least-squares loss `½ Σ (yᵢ − ⟨xᵢ,β⟩)²`. Gradients and Hessians are
//! assembled from the two design matrices without ever forming the full
//! `(p₁+p₂)²` Hessian.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SclError};
use crate::linalg::power_iteration;

/// Per-view loss.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    Logistic,
    Linear,
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LossKind::Logistic => f.write_str("logistic"),
            LossKind::Linear => f.write_str("linear"),
        }
    }
}

impl FromStr for LossKind {
    type Err = SclError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "logistic" | "log" => Ok(LossKind::Logistic),
            "linear" | "lin" => Ok(LossKind::Linear),
            other => Err(SclError::InvalidArgument(format!("unknown loss '{other}'"))),
        }
    }
}

/// `log(1 + exp(t))` without overflow.
#[inline]
pub fn log1p_exp(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

/// Logistic sigmoid, evaluated branch-wise so neither tail overflows.
#[inline]
pub fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// `σ(t)(1 − σ(t))`, accurate in both tails.
#[inline]
pub fn sigmoid_slope(t: f64) -> f64 {
    let e = (-t.abs()).exp();
    e / ((1.0 + e) * (1.0 + e))
}

/// Paired design matrices sharing one response vector.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemData {
    x: Array2<f64>,
    z: Array2<f64>,
    y: Array1<f64>,
    loss: LossKind,
}

impl ProblemData {
    pub fn new(x: Array2<f64>, z: Array2<f64>, y: Array1<f64>, loss: LossKind) -> Result<Self> {
        let n = y.len();
        if n == 0 {
            return Err(SclError::InvalidArgument("no samples".into()));
        }
        if x.nrows() != n || z.nrows() != n {
            return Err(SclError::DimensionMismatch(format!(
                "X has {} rows, Z has {} rows, y has {} entries",
                x.nrows(),
                z.nrows(),
                n
            )));
        }
        if x.ncols() == 0 || z.ncols() == 0 {
            return Err(SclError::InvalidArgument("design matrix without columns".into()));
        }
        let finite = |v: &f64| v.is_finite();
        if !(x.iter().all(finite) && z.iter().all(finite) && y.iter().all(finite)) {
            return Err(SclError::InvalidArgument("non-finite entry in data".into()));
        }
        if loss == LossKind::Logistic && y.iter().any(|&v| v != 0.0 && v != 1.0) {
            return Err(SclError::InvalidArgument(
                "logistic loss requires responses in {0, 1}".into(),
            ));
        }
        Ok(Self { x, z, y, loss })
    }

    pub fn x(&self) -> &Array2<f64> {
        &self.x
    }

    pub fn z(&self) -> &Array2<f64> {
        &self.z
    }

    pub fn y(&self) -> &Array1<f64> {
        &self.y
    }

    pub fn loss(&self) -> LossKind {
        self.loss
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p1(&self) -> usize {
        self.x.ncols()
    }

    pub fn p2(&self) -> usize {
        self.z.ncols()
    }

    /// Sub-instance made of the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        if let Some(&bad) = rows.iter().find(|&&r| r >= self.n()) {
            return Err(SclError::InvalidArgument(format!("row {bad} out of range")));
        }
        let x = self.x.select(ndarray::Axis(0), rows);
        let z = self.z.select(ndarray::Axis(0), rows);
        let y = self.y.select(ndarray::Axis(0), rows);
        Self::new(x, z, y, self.loss)
    }

    fn check_iterate(&self, beta: &Iterate) -> Result<()> {
        if beta.p1() != self.p1() || beta.p2() != self.p2() {
            return Err(SclError::DimensionMismatch(format!(
                "iterate has blocks ({}, {}), data has ({}, {})",
                beta.p1(),
                beta.p2(),
                self.p1(),
                self.p2()
            )));
        }
        Ok(())
    }
}

/// Positive weights on the two losses and the coupling term.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightConfig {
    a: f64,
    b: f64,
    c: f64,
}

impl WeightConfig {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b), ("c", c)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SclError::InvalidArgument(format!(
                    "weight {name} must be positive, got {v}"
                )));
            }
        }
        Ok(Self { a, b, c })
    }

    /// `a = s₁/(s₁+s₂)`, `b = s₂/(s₁+s₂)`, `c = 1/(s₁+s₂)`.
    pub fn from_budget(budget: SparsityBudget) -> Self {
        let s = budget.total() as f64;
        Self {
            a: budget.s1() as f64 / s,
            b: budget.s2() as f64 / s,
            c: 1.0 / s,
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

/// Cardinality bounds for the two blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparsityBudget {
    s1: usize,
    s2: usize,
}

impl SparsityBudget {
    pub fn new(s1: usize, s2: usize) -> Result<Self> {
        if s1 == 0 || s2 == 0 {
            return Err(SclError::InvalidArgument("sparsity levels must be at least 1".into()));
        }
        Ok(Self { s1, s2 })
    }

    pub fn s1(&self) -> usize {
        self.s1
    }

    pub fn s2(&self) -> usize {
        self.s2
    }

    /// `s = s₁ + s₂`.
    pub fn total(&self) -> usize {
        self.s1 + self.s2
    }

    pub fn check(&self, p1: usize, p2: usize) -> Result<()> {
        if self.s1 > p1 || self.s2 > p2 {
            return Err(SclError::InvalidArgument(format!(
                "budget ({}, {}) exceeds dimensions ({p1}, {p2})",
                self.s1, self.s2
            )));
        }
        Ok(())
    }
}

fn nonzeros(v: &Array1<f64>) -> Vec<usize> {
    v.iter()
        .enumerate()
        .filter_map(|(i, &x)| (x != 0.0).then_some(i))
        .collect()
}

/// Stacked coefficient vector `(β₁; β₂)` with its support sets.
///
/// Supports are recomputed whenever a vector is set, so they always match
/// the nonzero pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct Iterate {
    beta1: Array1<f64>,
    beta2: Array1<f64>,
    support1: Vec<usize>,
    support2: Vec<usize>,
}

impl Iterate {
    pub fn new(beta1: Array1<f64>, beta2: Array1<f64>) -> Self {
        let support1 = nonzeros(&beta1);
        let support2 = nonzeros(&beta2);
        Self {
            beta1,
            beta2,
            support1,
            support2,
        }
    }

    pub fn zeros(p1: usize, p2: usize) -> Self {
        Self::new(Array1::zeros(p1), Array1::zeros(p2))
    }

    /// Splits a stacked vector after its first `p1` entries.
    pub fn from_stacked(v: ArrayView1<f64>, p1: usize) -> Result<Self> {
        if p1 > v.len() {
            return Err(SclError::DimensionMismatch(format!(
                "cannot split vector of length {} at {p1}",
                v.len()
            )));
        }
        let beta1 = v.slice(ndarray::s![..p1]).to_owned();
        let beta2 = v.slice(ndarray::s![p1..]).to_owned();
        Ok(Self::new(beta1, beta2))
    }

    pub fn beta1(&self) -> &Array1<f64> {
        &self.beta1
    }

    pub fn beta2(&self) -> &Array1<f64> {
        &self.beta2
    }

    pub fn support1(&self) -> &[usize] {
        &self.support1
    }

    pub fn support2(&self) -> &[usize] {
        &self.support2
    }

    pub fn p1(&self) -> usize {
        self.beta1.len()
    }

    pub fn p2(&self) -> usize {
        self.beta2.len()
    }

    pub fn dim(&self) -> usize {
        self.p1() + self.p2()
    }

    pub fn stacked(&self) -> Array1<f64> {
        self.beta1.iter().chain(self.beta2.iter()).copied().collect()
    }

    /// Support of the stacked vector; block-2 indices are offset by `p₁`.
    pub fn stacked_support(&self) -> Vec<usize> {
        let p1 = self.p1();
        self.support1
            .iter()
            .copied()
            .chain(self.support2.iter().map(|&i| i + p1))
            .collect()
    }

    pub fn is_feasible(&self, budget: SparsityBudget) -> bool {
        self.support1.len() <= budget.s1() && self.support2.len() <= budget.s2()
    }

    /// Euclidean distance between two iterates of equal shape.
    pub fn distance(&self, other: &Iterate) -> f64 {
        let d1 = &self.beta1 - &other.beta1;
        let d2 = &self.beta2 - &other.beta2;
        (d1.dot(&d1) + d2.dot(&d2)).sqrt()
    }
}

/// `Xβ₁` and `Zβ₂`.
#[derive(Clone, Debug)]
pub(crate) struct Margins {
    pub xb: Array1<f64>,
    pub zb: Array1<f64>,
}

fn sparse_product(a: &Array2<f64>, beta: &Array1<f64>, support: &[usize]) -> Array1<f64> {
    let mut out = Array1::zeros(a.nrows());
    for &j in support {
        out.scaled_add(beta[j], &a.column(j));
    }
    out
}

pub(crate) fn margins(data: &ProblemData, beta: &Iterate) -> Margins {
    Margins {
        xb: sparse_product(&data.x, &beta.beta1, &beta.support1),
        zb: sparse_product(&data.z, &beta.beta2, &beta.support2),
    }
}

fn loss_sum(loss: LossKind, t: &Array1<f64>, y: &Array1<f64>) -> f64 {
    match loss {
        LossKind::Logistic => t.iter().zip(y).map(|(&t, &y)| log1p_exp(t) - y * t).sum(),
        LossKind::Linear => t.iter().zip(y).map(|(&t, &y)| 0.5 * (y - t) * (y - t)).sum(),
    }
}

pub(crate) fn objective_at(data: &ProblemData, w: &WeightConfig, m: &Margins) -> f64 {
    let coupling: f64 = m.xb.iter().zip(&m.zb).map(|(u, v)| (u - v) * (u - v)).sum();
    let l1 = loss_sum(data.loss, &m.xb, &data.y);
    let l2 = loss_sum(data.loss, &m.zb, &data.y);
    (w.a * l1 + w.b * l2 + 0.5 * w.c * coupling) / data.n() as f64
}

fn residual(loss: LossKind, t: &Array1<f64>, y: &Array1<f64>) -> Array1<f64> {
    match loss {
        LossKind::Logistic => t.iter().zip(y).map(|(&t, &y)| sigmoid(t) - y).collect(),
        LossKind::Linear => t - y,
    }
}

/// Stacked gradient `(∇₁f; ∇₂f)` from precomputed margins.
pub(crate) fn gradient_at(data: &ProblemData, w: &WeightConfig, m: &Margins) -> Array1<f64> {
    let n = data.n() as f64;
    let gap = &m.xb - &m.zb;
    let r1 = residual(data.loss, &m.xb, &data.y) * w.a + &gap * w.c;
    let r2 = residual(data.loss, &m.zb, &data.y) * w.b - &gap * w.c;
    let g1 = data.x.t().dot(&r1) / n;
    let g2 = data.z.t().dot(&r2) / n;
    g1.iter().chain(g2.iter()).copied().collect()
}

/// Objective value `f(β)`.
pub fn objective(data: &ProblemData, w: &WeightConfig, beta: &Iterate) -> Result<f64> {
    data.check_iterate(beta)?;
    Ok(objective_at(data, w, &margins(data, beta)))
}

/// Stacked gradient `(∇₁f(β); ∇₂f(β))` of length `p₁ + p₂`.
pub fn gradient(data: &ProblemData, w: &WeightConfig, beta: &Iterate) -> Result<Array1<f64>> {
    data.check_iterate(beta)?;
    Ok(gradient_at(data, w, &margins(data, beta)))
}

/// Per-sample curvature weights of each loss: `σ'(⟨xᵢ,β⟩)` or 1.
fn curvature(loss: LossKind, t: &Array1<f64>) -> Array1<f64> {
    match loss {
        LossKind::Logistic => t.mapv(sigmoid_slope),
        LossKind::Linear => Array1::ones(t.len()),
    }
}

pub(crate) fn restricted_hessian_at(
    data: &ProblemData,
    w: &WeightConfig,
    m: &Margins,
    support: &[usize],
) -> Result<Array2<f64>> {
    let p1 = data.p1();
    let dim = p1 + data.p2();
    if let Some(&bad) = support.iter().find(|&&i| i >= dim) {
        return Err(SclError::InvalidArgument(format!(
            "support index {bad} out of range for dimension {dim}"
        )));
    }
    let n = data.n();
    let w1 = curvature(data.loss, &m.xb) * w.a + w.c;
    let w2 = curvature(data.loss, &m.zb) * w.b + w.c;

    // (is_block_one, column) for every support entry, in the requested order.
    let cols: Vec<(bool, ArrayView1<f64>)> = support
        .iter()
        .map(|&i| {
            if i < p1 {
                (true, data.x.column(i))
            } else {
                (false, data.z.column(i - p1))
            }
        })
        .collect();

    let k = support.len();
    let mut h = Array2::zeros((k, k));
    for r in 0..k {
        for s in r..k {
            let (br, cr) = &cols[r];
            let (bs, cs) = &cols[s];
            let v = match (br, bs) {
                (true, true) => (0..n).map(|i| cr[i] * w1[i] * cs[i]).sum::<f64>(),
                (false, false) => (0..n).map(|i| cr[i] * w2[i] * cs[i]).sum::<f64>(),
                _ => -w.c * cr.dot(cs),
            } / n as f64;
            h[[r, s]] = v;
            h[[s, r]] = v;
        }
    }
    Ok(h)
}

/// Principal submatrix of `∇²f(β)` on the stacked index set `support`.
pub fn restricted_hessian(
    data: &ProblemData,
    w: &WeightConfig,
    beta: &Iterate,
    support: &[usize],
) -> Result<Array2<f64>> {
    data.check_iterate(beta)?;
    restricted_hessian_at(data, w, &margins(data, beta), support)
}

/// Global curvature bound `L_f`.
///
/// Largest eigenvalue of
/// `(1/n)[[(κa + c)XᵀX, −cXᵀZ], [−cZᵀX, (κb + c)ZᵀZ]]` with `κ = 1/4` for the
/// logistic loss (the sigmoid slope never exceeds 1/4) and `κ = 1` for least
/// squares, computed by power iteration through products with `X` and `Z`.
pub fn smoothness_constant(data: &ProblemData, w: &WeightConfig) -> Result<f64> {
    let kappa = match data.loss {
        LossKind::Logistic => 0.25,
        LossKind::Linear => 1.0,
    };
    let (p1, n) = (data.p1(), data.n() as f64);
    let (d1, d2) = (kappa * w.a + w.c, kappa * w.b + w.c);
    power_iteration(p1 + data.p2(), |v| {
        let xv = data.x.dot(&v.slice(ndarray::s![..p1]));
        let zv = data.z.dot(&v.slice(ndarray::s![p1..]));
        let top = data.x.t().dot(&(&xv * d1 - &zv * w.c)) / n;
        let bottom = data.z.t().dot(&(&zv * d2 - &xv * w.c)) / n;
        top.iter().chain(bottom.iter()).copied().collect()
    })
}

fn gram_lambda_max(a: &Array2<f64>) -> Result<f64> {
    power_iteration(a.ncols(), |v| a.t().dot(&a.dot(v)))
}

fn max_row_l1(a: &Array2<f64>) -> f64 {
    a.rows()
        .into_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Lipschitz constant `C_f` of the logistic Hessian,
/// `(3√2/n)·max{a·maxᵢ‖xᵢ‖₁·λ_max(XᵀX), b·maxᵢ‖zᵢ‖₁·λ_max(ZᵀZ)}`.
///
/// Zero for least squares, whose Hessian is constant.
pub fn lipschitz_hessian_constant(data: &ProblemData, w: &WeightConfig) -> Result<f64> {
    if data.loss == LossKind::Linear {
        return Ok(0.0);
    }
    let first = w.a * max_row_l1(&data.x) * gram_lambda_max(&data.x)?;
    let second = w.b * max_row_l1(&data.z) * gram_lambda_max(&data.z)?;
    Ok(3.0 * std::f64::consts::SQRT_2 / data.n() as f64 * first.max(second))
}
