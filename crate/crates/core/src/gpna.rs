//! Gradient projection with gated restricted Newton steps.
//!
//! Each iteration takes an Armijo-backtracked projected gradient step
//! `uᵏ = Π_Σ(βᵏ − αₖ∇f(βᵏ))`. When the supports have settled or the gradient
//! blocks are small, a Newton step restricted to `Γₖ = Γ(uᵏ)` is attempted and
//! kept only if it decreases `f` by at least `(σ/2)‖vᵏ − uᵏ‖²`. The loop stops
//! once `tolₖ = ‖(∇f(βᵏ⁺¹))_{Γₖ}‖` drops to the stopping tolerance.

use log::debug;
use ndarray::{s, Array1};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SclError};
use crate::linalg::spd_solve;
use crate::model::{
    gradient_at, margins, objective_at, restricted_hessian_at, Iterate, Margins, ProblemData, SparsityBudget,
    WeightConfig,
};
use crate::projection::project_pair;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Sufficient-decrease coefficient σ.
    pub sigma: f64,
    /// Gradient-norm threshold ϵ of the Newton gate.
    pub epsilon_gate: f64,
    /// Stopping tolerance ε on `tolₖ`.
    pub epsilon_stop: f64,
    /// Initial trial step α₀ in (0, 1].
    pub alpha0: f64,
    /// Backtracking factor γ in (0, 1).
    pub gamma: f64,
    pub max_iter: usize,
    pub max_backtracks: usize,
    /// Starting point; the zero vector when absent.
    #[serde(skip)]
    pub initial: Option<Iterate>,
    /// Record every iterate in [`SolverReport::iterates`].
    #[serde(skip)]
    pub keep_iterates: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            sigma: 1e-4,
            epsilon_gate: 1e-3,
            epsilon_stop: 1e-4,
            alpha0: 1.0,
            gamma: 0.5,
            max_iter: 1000,
            max_backtracks: 50,
            initial: None,
            keep_iterates: false,
        }
    }
}

impl SolverOptions {
    // Negated comparisons so that NaN fails every check.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(SclError::InvalidArgument(msg.to_string()));
        if !(self.sigma > 0.0) {
            return bad("sigma must be positive");
        }
        if !(self.epsilon_gate > 0.0) || !(self.epsilon_stop > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.alpha0 > 0.0 && self.alpha0 <= 1.0) {
            return bad("alpha0 must lie in (0, 1]");
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad("gamma must lie in (0, 1)");
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1");
        }
        Ok(())
    }
}

/// What happened after the gradient step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepKind {
    GradientOnly,
    GradientPlusNewton,
    /// The gate fired but the Newton system was singular or its solution
    /// failed the descent test.
    NewtonRejected,
}

/// Newton gate outcome; the first satisfied condition wins.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Gate {
    None,
    /// Both supports unchanged by the gradient step.
    Cond1,
    /// `‖∇₁f(uᵏ)‖ < ϵ` and block-2 support unchanged.
    Cond2,
    /// `‖∇₂f(uᵏ)‖ < ϵ` and block-1 support unchanged.
    Cond3,
    /// Both gradient blocks below ϵ.
    Cond4,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationRecord {
    pub k: usize,
    /// `f(βᵏ⁺¹)`.
    pub objective: f64,
    pub alpha: f64,
    /// Backtracks `qₖ`, so `alpha = α₀γ^qₖ`.
    pub backtracks: usize,
    pub step: StepKind,
    pub gate: Gate,
    pub tol: f64,
    /// `Γₖ`, stacked indices.
    pub support: Vec<usize>,
    /// `‖βᵏ⁺¹ − βᵏ‖`.
    pub displacement: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    TolReached,
    MaxIter,
    /// An iteration left `β` bit-for-bit unchanged above the tolerance, so
    /// the remaining iterations could not move it either. Happens when `tolₖ`
    /// sits at the rounding floor of the problem.
    Stalled,
}

#[derive(Clone, Debug)]
pub struct SolverReport {
    pub solution: Iterate,
    pub trace: Vec<IterationRecord>,
    pub termination: Termination,
    pub final_tol: f64,
    /// `f(β⁰)`.
    pub initial_objective: f64,
    /// `β¹, β², …` when [`SolverOptions::keep_iterates`] is set.
    pub iterates: Vec<Iterate>,
}

impl SolverReport {
    pub fn iterations(&self) -> usize {
        self.trace.len()
    }

    pub fn final_objective(&self) -> f64 {
        self.trace.last().map_or(self.initial_objective, |r| r.objective)
    }
}

/// Accepted projected-gradient step.
#[derive(Clone, Debug)]
pub struct ArmijoStep {
    pub alpha: f64,
    pub point: Iterate,
    pub backtracks: usize,
}

/// Evaluated point: iterate, margins, objective.
struct Eval {
    point: Iterate,
    margins: Margins,
    value: f64,
}

impl Eval {
    fn new(data: &ProblemData, w: &WeightConfig, point: Iterate) -> Self {
        let margins = margins(data, &point);
        let value = objective_at(data, w, &margins);
        Self { point, margins, value }
    }
}

fn sq_dist(a: &Iterate, b: &Iterate) -> f64 {
    let d = a.distance(b);
    d * d
}

fn armijo_from(
    data: &ProblemData,
    w: &WeightConfig,
    current: &Eval,
    grad: &Array1<f64>,
    budget: SparsityBudget,
    opts: &SolverOptions,
) -> Result<(f64, usize, Eval)> {
    let p1 = data.p1();
    let base = current.point.stacked();
    let mut alpha = opts.alpha0;
    let mut violation = f64::NAN;
    for q in 0..=opts.max_backtracks {
        let trial = &base - &(grad * alpha);
        let point = project_pair(trial.slice(s![..p1]), trial.slice(s![p1..]), budget)?;
        let eval = Eval::new(data, w, point);
        let decrease = 0.5 * opts.sigma * sq_dist(&eval.point, &current.point);
        violation = eval.value - (current.value - decrease);
        if violation <= 0.0 {
            return Ok((alpha, q, eval));
        }
        alpha *= opts.gamma;
    }
    Err(SclError::LineSearch {
        backtracks: opts.max_backtracks,
        violation,
    })
}

fn check_start(data: &ProblemData, beta: &Iterate, budget: SparsityBudget) -> Result<()> {
    budget.check(data.p1(), data.p2())?;
    if beta.p1() != data.p1() || beta.p2() != data.p2() {
        return Err(SclError::DimensionMismatch("iterate does not match data".into()));
    }
    if !beta.is_feasible(budget) {
        return Err(SclError::InvalidArgument("iterate violates the sparsity budget".into()));
    }
    Ok(())
}

fn same_bits(a: &Iterate, b: &Iterate) -> bool {
    let bits = |it: &Iterate| it.stacked().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    bits(a) == bits(b)
}

/// Projected gradient step with Armijo backtracking from a feasible `beta_k`.
pub fn armijo_step(
    data: &ProblemData,
    w: &WeightConfig,
    beta_k: &Iterate,
    budget: SparsityBudget,
    opts: &SolverOptions,
) -> Result<ArmijoStep> {
    check_start(data, beta_k, budget)?;
    let current = Eval::new(data, w, beta_k.clone());
    let grad = gradient_at(data, w, &current.margins);
    let (alpha, backtracks, eval) = armijo_from(data, w, &current, &grad, budget, opts)?;
    Ok(ArmijoStep {
        alpha,
        point: eval.point,
        backtracks,
    })
}

fn block_norm(v: ndarray::ArrayView1<f64>) -> f64 {
    v.dot(&v).sqrt()
}

/// Evaluates the Newton gate at the gradient-step point `u_k`.
pub fn newton_gate(grad_at_u: &Array1<f64>, beta_k: &Iterate, u_k: &Iterate, epsilon_gate: f64) -> Gate {
    let p1 = u_k.p1();
    let same1 = beta_k.support1() == u_k.support1();
    let same2 = beta_k.support2() == u_k.support2();
    let small1 = block_norm(grad_at_u.slice(s![..p1])) < epsilon_gate;
    let small2 = block_norm(grad_at_u.slice(s![p1..])) < epsilon_gate;
    if same1 && same2 {
        Gate::Cond1
    } else if small1 && same2 {
        Gate::Cond2
    } else if small2 && same1 {
        Gate::Cond3
    } else if small1 && small2 {
        Gate::Cond4
    } else {
        Gate::None
    }
}

fn newton_from(
    data: &ProblemData,
    w: &WeightConfig,
    u: &Iterate,
    m: &Margins,
    grad: &Array1<f64>,
) -> Result<Option<Iterate>> {
    let support = u.stacked_support();
    let h = restricted_hessian_at(data, w, m, &support)?;
    let rhs: Array1<f64> = support.iter().map(|&i| -grad[i]).collect();
    let Some(step) = spd_solve(&h, &rhs) else {
        return Ok(None);
    };
    let mut v = Array1::zeros(u.dim());
    let base = u.stacked();
    for (&i, d) in support.iter().zip(&step) {
        v[i] = base[i] + d;
    }
    Ok(Some(Iterate::from_stacked(v.view(), u.p1())?))
}

/// Restricted Newton step on `Γ(u_k)`.
///
/// Solves `H_{ΓΓ}(v_Γ − u_Γ) = −(∇f(u_k))_Γ` with `v` zero off `Γ`. Returns
/// `None` when the restricted Hessian is not numerically positive definite.
pub fn newton_step(
    data: &ProblemData,
    w: &WeightConfig,
    u_k: &Iterate,
    budget: SparsityBudget,
) -> Result<Option<Iterate>> {
    check_start(data, u_k, budget)?;
    let m = margins(data, u_k);
    let grad = gradient_at(data, w, &m);
    newton_from(data, w, u_k, &m, &grad)
}

/// `f(v) ≤ f(u) − (σ/2)‖v − u‖²`.
pub fn newton_accept(data: &ProblemData, w: &WeightConfig, u_k: &Iterate, v_k: &Iterate, sigma: f64) -> Result<bool> {
    let fu = crate::model::objective(data, w, u_k)?;
    let fv = crate::model::objective(data, w, v_k)?;
    Ok(fv <= fu - 0.5 * sigma * sq_dist(v_k, u_k))
}

/// Runs the solver from `opts.initial` (zero by default).
pub fn solve(
    data: &ProblemData,
    w: &WeightConfig,
    budget: SparsityBudget,
    opts: &SolverOptions,
) -> Result<SolverReport> {
    opts.validate()?;
    let start = opts
        .initial
        .clone()
        .unwrap_or_else(|| Iterate::zeros(data.p1(), data.p2()));
    check_start(data, &start, budget)?;

    let mut current = Eval::new(data, w, start);
    let mut grad = gradient_at(data, w, &current.margins);
    let initial_objective = current.value;
    let mut trace = Vec::new();
    let mut iterates = Vec::new();

    let (termination, final_tol) = loop {
        let k = trace.len();
        let (alpha, backtracks, u) = armijo_from(data, w, &current, &grad, budget, opts)?;
        let grad_u = gradient_at(data, w, &u.margins);
        let gate = newton_gate(&grad_u, &current.point, &u.point, opts.epsilon_gate);
        let support = u.point.stacked_support();

        let mut step = StepKind::GradientOnly;
        let mut next = None;
        if gate != Gate::None {
            step = StepKind::NewtonRejected;
            if let Some(v) = newton_from(data, w, &u.point, &u.margins, &grad_u)? {
                let ev = Eval::new(data, w, v);
                if ev.value <= u.value - 0.5 * opts.sigma * sq_dist(&ev.point, &u.point) {
                    step = StepKind::GradientPlusNewton;
                    next = Some(ev);
                }
            }
        }
        let (next, next_grad) = match next {
            Some(ev) => {
                let g = gradient_at(data, w, &ev.margins);
                (ev, g)
            }
            None => (u, grad_u),
        };

        let tol = if support.is_empty() {
            block_norm(next_grad.view())
        } else {
            support.iter().map(|&i| next_grad[i] * next_grad[i]).sum::<f64>().sqrt()
        };
        let displacement = next.point.distance(&current.point);
        let unchanged = same_bits(&next.point, &current.point);
        debug!(
            "k={k} f={:.12e} alpha={alpha:e} q={backtracks} {step:?} {gate:?} tol={tol:e}",
            next.value
        );
        trace.push(IterationRecord {
            k,
            objective: next.value,
            alpha,
            backtracks,
            step,
            gate,
            tol,
            support,
            displacement,
        });
        if opts.keep_iterates {
            iterates.push(next.point.clone());
        }
        current = next;
        grad = next_grad;

        if tol <= opts.epsilon_stop {
            break (Termination::TolReached, tol);
        }
        if unchanged {
            // Every later iteration would repeat this one exactly.
            break (Termination::Stalled, tol);
        }
        if trace.len() >= opts.max_iter {
            break (Termination::MaxIter, tol);
        }
    };

    Ok(SolverReport {
        solution: current.point,
        trace,
        termination,
        final_tol,
        initial_objective,
        iterates,
    })
}
