//! Exhaustive reference computations for desk-scale instances.
//!
//! Everything here works on dense matrices assembled sample by sample and
//! enumerates supports explicitly. It is meant for tests and for certifying
//! small instances, and refuses anything large.

use itertools::Itertools;
use ndarray::{Array1, Array2};

use crate::error::{Result, SclError};
use crate::linalg::{column_rank, lstsq, spd_solve, symmetric_eigenvalues};
use crate::model::{Iterate, LossKind, ProblemData, SparsityBudget, WeightConfig};

/// Largest number of support pairs the exhaustive solver will visit.
pub const MAX_SUPPORT_PAIRS: f64 = 1e6;
/// Largest `p₁ + p₂` accepted by [`restricted_convexity_constant`].
pub const MAX_CONVEXITY_DIM: usize = 16;
/// Newton iterations allowed per logistic subproblem before the support is
/// declared divergent.
pub const SUBPROBLEM_MAX_ITER: usize = 200;
/// Gradient-norm target for the logistic subproblems.
pub const SUBPROBLEM_TOL: f64 = 1e-10;

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

fn logistic(t: f64) -> f64 {
    if t > 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

fn row_dot(a: &Array2<f64>, i: usize, v: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (j, &vj) in v.iter().enumerate() {
        acc += a[[i, j]] * vj;
    }
    acc
}

/// Objective evaluated one sample at a time on a stacked coefficient vector.
pub fn dense_objective(data: &ProblemData, w: &WeightConfig, beta: &[f64]) -> f64 {
    let (p1, n) = (data.p1(), data.n());
    let (b1, b2) = beta.split_at(p1);
    let mut total = 0.0;
    for i in 0..n {
        let t1 = row_dot(data.x(), i, b1);
        let t2 = row_dot(data.z(), i, b2);
        let y = data.y()[i];
        let (l1, l2) = match data.loss() {
            LossKind::Logistic => (softplus(t1) - y * t1, softplus(t2) - y * t2),
            LossKind::Linear => (0.5 * (y - t1).powi(2), 0.5 * (y - t2).powi(2)),
        };
        total += w.a() * l1 + w.b() * l2 + 0.5 * w.c() * (t1 - t2).powi(2);
    }
    total / n as f64
}

/// Stacked gradient, one sample at a time.
#[allow(clippy::needless_range_loop)]
pub fn dense_gradient(data: &ProblemData, w: &WeightConfig, beta: &[f64]) -> Vec<f64> {
    let (p1, p2, n) = (data.p1(), data.p2(), data.n());
    let (b1, b2) = beta.split_at(p1);
    let mut g = vec![0.0; p1 + p2];
    for i in 0..n {
        let t1 = row_dot(data.x(), i, b1);
        let t2 = row_dot(data.z(), i, b2);
        let y = data.y()[i];
        let (r1, r2) = match data.loss() {
            LossKind::Logistic => (logistic(t1) - y, logistic(t2) - y),
            LossKind::Linear => (t1 - y, t2 - y),
        };
        let c1 = w.a() * r1 + w.c() * (t1 - t2);
        let c2 = w.b() * r2 - w.c() * (t1 - t2);
        for j in 0..p1 {
            g[j] += data.x()[[i, j]] * c1;
        }
        for j in 0..p2 {
            g[p1 + j] += data.z()[[i, j]] * c2;
        }
    }
    g.iter().map(|v| v / n as f64).collect()
}

/// Full `(p₁+p₂)²` Hessian, one sample at a time.
pub fn dense_hessian(data: &ProblemData, w: &WeightConfig, beta: &[f64]) -> Array2<f64> {
    let (p1, p2, n) = (data.p1(), data.p2(), data.n());
    let (b1, b2) = beta.split_at(p1);
    let dim = p1 + p2;
    let mut h = Array2::zeros((dim, dim));
    for i in 0..n {
        let (d1, d2) = match data.loss() {
            LossKind::Logistic => {
                let s1 = logistic(row_dot(data.x(), i, b1));
                let s2 = logistic(row_dot(data.z(), i, b2));
                (s1 * (1.0 - s1), s2 * (1.0 - s2))
            }
            LossKind::Linear => (1.0, 1.0),
        };
        let row: Vec<f64> = (0..p1)
            .map(|j| data.x()[[i, j]])
            .chain((0..p2).map(|j| data.z()[[i, j]]))
            .collect();
        for r in 0..dim {
            for s in 0..dim {
                let weight = match (r < p1, s < p1) {
                    (true, true) => w.a() * d1 + w.c(),
                    (false, false) => w.b() * d2 + w.c(),
                    _ => -w.c(),
                };
                h[[r, s]] += weight * row[r] * row[s];
            }
        }
    }
    h / n as f64
}

/// The constant block matrix whose top eigenvalue is `L_f`.
pub fn smoothness_matrix(data: &ProblemData, w: &WeightConfig) -> Array2<f64> {
    let kappa = match data.loss() {
        LossKind::Logistic => 0.25,
        LossKind::Linear => 1.0,
    };
    let as_linear = ProblemData::new(
        data.x().clone(),
        data.z().clone(),
        Array1::zeros(data.n()),
        LossKind::Linear,
    )
    .expect("validated data stays valid");
    let scaled = WeightConfig::new(kappa * w.a(), kappa * w.b(), w.c()).expect("positive weights");
    dense_hessian(&as_linear, &scaled, &vec![0.0; data.p1() + data.p2()])
}

/// `L_f` by dense symmetric eigensolve.
pub fn dense_smoothness_constant(data: &ProblemData, w: &WeightConfig) -> f64 {
    symmetric_eigenvalues(&smoothness_matrix(data, w))
        .last()
        .copied()
        .unwrap_or(0.0)
}

/// Matrix whose restricted eigenvalues define `l_f`: `Q` for least squares,
/// `(c/n)[X −Z]ᵀ[X −Z]` for the logistic loss.
pub fn convexity_matrix(data: &ProblemData, w: &WeightConfig) -> Array2<f64> {
    match data.loss() {
        LossKind::Linear => smoothness_matrix(data, w),
        LossKind::Logistic => {
            let (p1, p2, n) = (data.p1(), data.p2(), data.n());
            let dim = p1 + p2;
            let mut m = Array2::zeros((dim, dim));
            for i in 0..n {
                let row: Vec<f64> = (0..p1)
                    .map(|j| data.x()[[i, j]])
                    .chain((0..p2).map(|j| -data.z()[[i, j]]))
                    .collect();
                for r in 0..dim {
                    for s in 0..dim {
                        m[[r, s]] += row[r] * row[s];
                    }
                }
            }
            m * (w.c() / n as f64)
        }
    }
}

fn principal(m: &Array2<f64>, idx: &[usize]) -> Array2<f64> {
    Array2::from_shape_fn((idx.len(), idx.len()), |(r, s)| m[[idx[r], idx[s]]])
}

/// Exact restricted convexity constant and the support attaining it.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexityBound {
    pub value: f64,
    pub support: Vec<usize>,
}

/// `l_f = min_{|T| ≤ s₁+s₂} λ_min(M_TT)` by enumerating every support.
pub fn restricted_convexity_constant(
    data: &ProblemData,
    w: &WeightConfig,
    budget: SparsityBudget,
) -> Result<ConvexityBound> {
    let dim = data.p1() + data.p2();
    if dim > MAX_CONVEXITY_DIM {
        return Err(SclError::TooLarge(format!(
            "p1 + p2 = {dim} exceeds {MAX_CONVEXITY_DIM}"
        )));
    }
    let m = convexity_matrix(data, w);
    let mut best = ConvexityBound {
        value: f64::INFINITY,
        support: Vec::new(),
    };
    for size in 1..=budget.total().min(dim) {
        for t in (0..dim).combinations(size) {
            let lo = symmetric_eigenvalues(&principal(&m, &t))[0];
            if lo < best.value {
                best = ConvexityBound { value: lo, support: t };
            }
        }
    }
    Ok(best)
}

/// Whether every `s` columns of `matrix` are linearly independent.
pub fn is_s_regular(matrix: &Array2<f64>, s: usize) -> Result<bool> {
    let p = matrix.ncols();
    if s > p {
        return Err(SclError::InvalidArgument(format!("s = {s} exceeds {p} columns")));
    }
    if binomial(p, s) > MAX_SUPPORT_PAIRS {
        return Err(SclError::TooLarge(format!("C({p}, {s}) column subsets")));
    }
    if s > matrix.nrows() {
        return Ok(false);
    }
    for cols in (0..p).combinations(s) {
        let sub = matrix.select(ndarray::Axis(1), &cols);
        if column_rank(&sub, 1e-10) < s {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `[X Z]`.
pub fn joint_design(data: &ProblemData) -> Array2<f64> {
    ndarray::concatenate(ndarray::Axis(1), &[data.x().view(), data.z().view()]).expect("row counts agree")
}

/// Global minimizer found by exhaustive support enumeration.
#[derive(Clone, Debug)]
pub struct OracleSolution {
    pub beta: Iterate,
    pub value: f64,
    pub supports_visited: usize,
    /// Logistic supports whose subproblem did not converge.
    pub divergent: usize,
}

fn solve_linear_restricted(data: &ProblemData, support: &[usize], q: &Array2<f64>, g0: &[f64]) -> Option<Vec<f64>> {
    let qt = principal(q, support);
    let rhs: Array1<f64> = support.iter().map(|&i| -g0[i]).collect();
    let sol = lstsq(&qt, &rhs)?;
    let mut beta = vec![0.0; data.p1() + data.p2()];
    for (&i, v) in support.iter().zip(sol.iter()) {
        beta[i] = *v;
    }
    Some(beta)
}

fn solve_logistic_restricted(data: &ProblemData, w: &WeightConfig, support: &[usize]) -> Option<Vec<f64>> {
    let dim = data.p1() + data.p2();
    let mut beta = vec![0.0; dim];
    let mut value = dense_objective(data, w, &beta);
    for _ in 0..SUBPROBLEM_MAX_ITER {
        let g = dense_gradient(data, w, &beta);
        let gt: Array1<f64> = support.iter().map(|&i| g[i]).collect();
        let gnorm = gt.dot(&gt).sqrt();
        if gnorm <= SUBPROBLEM_TOL {
            return Some(beta);
        }
        let h = principal(&dense_hessian(data, w, &beta), support);
        let neg = -&gt;
        let dir = spd_solve(&h, &neg).or_else(|| lstsq(&h, &neg))?;
        let slope = gt.dot(&dir);
        let mut t = 1.0;
        let mut moved = false;
        while t > 1e-20 {
            let mut trial = beta.clone();
            for (&i, d) in support.iter().zip(dir.iter()) {
                trial[i] += t * d;
            }
            let tv = dense_objective(data, w, &trial);
            if tv < value && tv <= value + 1e-4 * t * slope {
                beta = trial;
                value = tv;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            // No representable decrease left: accept only if the predicted
            // decrease is itself below the objective's rounding resolution.
            return (-slope <= 1e3 * f64::EPSILON * value.abs().max(1.0)).then_some(beta);
        }
    }
    None
}

/// Global minimizer over `‖β₁‖₀ ≤ s₁`, `‖β₂‖₀ ≤ s₂` by solving the convex
/// subproblem on every support pair with `|T₁| = s₁`, `|T₂| = s₂`.
///
/// Least-squares subproblems use the normal equations; logistic ones use a
/// damped Newton iteration. Logistic supports that fail to converge within
/// [`SUBPROBLEM_MAX_ITER`] iterations are skipped and counted.
pub fn global_solve_bruteforce(data: &ProblemData, w: &WeightConfig, budget: SparsityBudget) -> Result<OracleSolution> {
    budget.check(data.p1(), data.p2())?;
    let (p1, p2) = (data.p1(), data.p2());
    let pairs = binomial(p1, budget.s1()) * binomial(p2, budget.s2());
    if pairs > MAX_SUPPORT_PAIRS {
        return Err(SclError::TooLarge(format!("{pairs} support pairs")));
    }
    let dim = p1 + p2;
    let (q, g0) = match data.loss() {
        LossKind::Linear => (
            dense_hessian(data, w, &vec![0.0; dim]),
            dense_gradient(data, w, &vec![0.0; dim]),
        ),
        LossKind::Logistic => (Array2::zeros((0, 0)), Vec::new()),
    };

    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut visited = 0;
    let mut divergent = 0;
    for t1 in (0..p1).combinations(budget.s1()) {
        for t2 in (0..p2).combinations(budget.s2()) {
            visited += 1;
            let support: Vec<usize> = t1.iter().copied().chain(t2.iter().map(|&j| j + p1)).collect();
            let sol = match data.loss() {
                LossKind::Linear => solve_linear_restricted(data, &support, &q, &g0),
                LossKind::Logistic => solve_logistic_restricted(data, w, &support),
            };
            let Some(beta) = sol else {
                divergent += 1;
                continue;
            };
            let value = dense_objective(data, w, &beta);
            if best.as_ref().is_none_or(|(_, v)| value < *v) {
                best = Some((beta, value));
            }
        }
    }
    let (beta, value) = best.ok_or_else(|| SclError::InvalidArgument("no support subproblem converged".into()))?;
    Ok(OracleSolution {
        beta: Iterate::from_stacked(Array1::from(beta).view(), p1)?,
        value,
        supports_visited: visited,
        divergent,
    })
}
