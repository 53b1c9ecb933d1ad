//! Certificates for candidate solutions.
//!
//! Two conditions are checked blockwise, for `j = 1, 2`:
//!
//! * local minimizer: `(∇ⱼf)ᵢ = 0` on `Γ(βⱼ)` when `‖βⱼ‖₀ = sⱼ`, and `∇ⱼf = 0`
//!   when `‖βⱼ‖₀ < sⱼ`;
//! * α-stationarity: additionally `α|(∇ⱼf)ᵢ| ≤ t` off the support of a block
//!   at its budget, where `t` is the threshold magnitude of `β`.
//!
//! Violations are reported in gradient units, so a clause holds to tolerance
//! `tol` when its violation is at most `tol`.

use ndarray::{s, Array1, ArrayView1};
use serde::Serialize;

use crate::error::{Result, SclError};
use crate::model::{gradient, Iterate, ProblemData, SparsityBudget, WeightConfig};
use crate::projection::project_pair;

/// Which magnitude of `β` bounds the off-support gradient of a block at its
/// budget.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum ThresholdReading {
    /// The `sⱼ`-th largest magnitude of block `j`.
    #[default]
    PerBlock,
    /// The `(s₁+s₂)`-th largest magnitude of the stacked vector.
    Stacked,
}

/// Clause that failed for a block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Clause {
    /// Block at budget with a nonzero gradient entry on its support.
    OnSupportGradient,
    /// Block at budget whose off-support gradient exceeds the threshold.
    OffSupportThreshold,
    /// Block below budget with a nonzero gradient.
    FullGradient,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockDetail {
    pub at_budget: bool,
    /// `max |gᵢ|` over the support (at budget) or over the block (below).
    pub support_violation: f64,
    /// `max(0, |gᵢ| − t/α)` over the off-support entries; zero when the
    /// clause does not apply.
    pub threshold_violation: f64,
    pub failed: Option<Clause>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StationarityVerdict {
    pub is_local_min_condition: bool,
    pub is_alpha_stationary: bool,
    /// Step size the α-clauses were evaluated at. For [`check_local_min`]
    /// this is the largest α for which the point is α-stationary given its
    /// local-minimizer clauses (infinite when nothing bounds it).
    pub alpha_used: f64,
    pub max_violation: f64,
    pub detail: [BlockDetail; 2],
    /// `‖Π_Σ(β − α∇f(β)) − β‖` with the projection's own tie rule; zero for
    /// [`check_local_min`].
    pub projection_gap: f64,
}

/// `max(1e-6, 1e-8·‖∇f‖_∞)`.
pub fn default_tolerance(grad: &Array1<f64>) -> f64 {
    let inf = grad.iter().fold(0.0_f64, |m, g| m.max(g.abs()));
    1e-6_f64.max(1e-8 * inf)
}

fn inf_norm<'a>(it: impl Iterator<Item = &'a f64>) -> f64 {
    it.fold(0.0_f64, |m, g| m.max(g.abs()))
}

struct Block<'a> {
    beta: &'a Array1<f64>,
    support: &'a [usize],
    grad: ArrayView1<'a, f64>,
    budget: usize,
}

impl Block<'_> {
    fn at_budget(&self) -> bool {
        self.support.len() == self.budget
    }

    fn support_violation(&self) -> f64 {
        if self.at_budget() {
            inf_norm(self.support.iter().map(|&i| &self.grad[i]))
        } else {
            inf_norm(self.grad.iter())
        }
    }

    fn off_support_max(&self) -> f64 {
        let mut on = vec![false; self.beta.len()];
        for &i in self.support {
            on[i] = true;
        }
        self.grad
            .iter()
            .zip(&on)
            .filter(|(_, &o)| !o)
            .fold(0.0_f64, |m, (g, _)| m.max(g.abs()))
    }

    fn smallest_kept(&self) -> f64 {
        self.support
            .iter()
            .map(|&i| self.beta[i].abs())
            .fold(f64::INFINITY, f64::min)
    }
}

fn blocks<'a>(beta: &'a Iterate, grad: &'a Array1<f64>, budget: SparsityBudget) -> [Block<'a>; 2] {
    let p1 = beta.p1();
    [
        Block {
            beta: beta.beta1(),
            support: beta.support1(),
            grad: grad.slice(s![..p1]),
            budget: budget.s1(),
        },
        Block {
            beta: beta.beta2(),
            support: beta.support2(),
            grad: grad.slice(s![p1..]),
            budget: budget.s2(),
        },
    ]
}

fn validate(data: &ProblemData, beta: &Iterate, budget: SparsityBudget) -> Result<()> {
    budget.check(data.p1(), data.p2())?;
    if !beta.is_feasible(budget) {
        return Err(SclError::InvalidArgument(format!(
            "iterate with ({}, {}) nonzeros violates budget ({}, {})",
            beta.support1().len(),
            beta.support2().len(),
            budget.s1(),
            budget.s2()
        )));
    }
    Ok(())
}

/// `k`-th largest magnitude (1-based) of the stacked vector, 0 if it has fewer
/// than `k` entries.
fn kth_magnitude(beta: &Iterate, k: usize) -> f64 {
    let mut mags: Vec<f64> = beta.stacked().iter().map(|v| v.abs()).collect();
    if k == 0 || k > mags.len() {
        return 0.0;
    }
    mags.sort_by(|a, b| b.total_cmp(a));
    mags[k - 1]
}

/// Checks the local-minimizer conditions to infinity-norm tolerance `tol`.
pub fn check_local_min(
    data: &ProblemData,
    w: &WeightConfig,
    beta: &Iterate,
    budget: SparsityBudget,
    tol: f64,
) -> Result<StationarityVerdict> {
    validate(data, beta, budget)?;
    let grad = gradient(data, w, beta)?;
    let mut alpha_sup = f64::INFINITY;
    let detail = blocks(beta, &grad, budget).map(|b| {
        let v = b.support_violation();
        if b.at_budget() {
            let off = b.off_support_max();
            if off > 0.0 {
                alpha_sup = alpha_sup.min(b.smallest_kept() / off);
            }
        }
        BlockDetail {
            at_budget: b.at_budget(),
            support_violation: v,
            threshold_violation: 0.0,
            failed: (v > tol).then_some(if b.at_budget() {
                Clause::OnSupportGradient
            } else {
                Clause::FullGradient
            }),
        }
    });
    let max_violation = detail[0].support_violation.max(detail[1].support_violation);
    let ok = max_violation <= tol;
    Ok(StationarityVerdict {
        is_local_min_condition: ok,
        is_alpha_stationary: ok,
        alpha_used: alpha_sup,
        max_violation,
        detail,
        projection_gap: 0.0,
    })
}

/// Checks α-stationarity with the per-block threshold reading.
pub fn check_alpha_stationary(
    data: &ProblemData,
    w: &WeightConfig,
    beta: &Iterate,
    budget: SparsityBudget,
    alpha: f64,
    tol: f64,
) -> Result<StationarityVerdict> {
    check_alpha_stationary_with(data, w, beta, budget, alpha, tol, ThresholdReading::PerBlock)
}

/// Checks α-stationarity with an explicit threshold reading.
pub fn check_alpha_stationary_with(
    data: &ProblemData,
    w: &WeightConfig,
    beta: &Iterate,
    budget: SparsityBudget,
    alpha: f64,
    tol: f64,
    reading: ThresholdReading,
) -> Result<StationarityVerdict> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(SclError::InvalidArgument(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    validate(data, beta, budget)?;
    let grad = gradient(data, w, beta)?;
    let stacked_threshold = kth_magnitude(beta, budget.total());

    let detail = blocks(beta, &grad, budget).map(|b| {
        let support_violation = b.support_violation();
        let threshold_violation = if b.at_budget() {
            let t = match reading {
                ThresholdReading::PerBlock => b.smallest_kept(),
                ThresholdReading::Stacked => stacked_threshold,
            };
            (b.off_support_max() - t / alpha).max(0.0)
        } else {
            0.0
        };
        let failed = if support_violation > tol {
            Some(if b.at_budget() {
                Clause::OnSupportGradient
            } else {
                Clause::FullGradient
            })
        } else if threshold_violation > tol {
            Some(Clause::OffSupportThreshold)
        } else {
            None
        };
        BlockDetail {
            at_budget: b.at_budget(),
            support_violation,
            threshold_violation,
            failed,
        }
    });

    let local = detail[0].support_violation.max(detail[1].support_violation);
    let max_violation = detail
        .iter()
        .map(|d| d.support_violation.max(d.threshold_violation))
        .fold(0.0, f64::max);

    let stepped = beta.stacked() - &(&grad * alpha);
    let p1 = beta.p1();
    let projected = project_pair(stepped.slice(s![..p1]), stepped.slice(s![p1..]), budget)?;

    Ok(StationarityVerdict {
        is_local_min_condition: local <= tol,
        is_alpha_stationary: max_violation <= tol,
        alpha_used: alpha,
        max_violation,
        detail,
        projection_gap: projected.distance(beta),
    })
}
