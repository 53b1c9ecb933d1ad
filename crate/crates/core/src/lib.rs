//! Sparse collaborative learning.
//!
//! Two views `X` and `Z` of the same `n` samples share one response `y`. The
//! solver minimizes
//!
//! ```text
//! f(β₁, β₂) = (1/n)[a·ℓ(β₁; X, y) + b·ℓ(β₂; Z, y) + (c/2)‖Xβ₁ − Zβ₂‖²]
//! ```
//!
//! subject to `‖β₁‖₀ ≤ s₁` and `‖β₂‖₀ ≤ s₂`, where `ℓ` is the logistic or the
//! least-squares loss. [`gpna::solve`] combines Armijo-backtracked hard
//! thresholding steps with Newton steps restricted to the current support.
//!
//! ```
//! use scl::{solve, generate, LossKind, SolverOptions, SparsityBudget, SynthSpec, WeightConfig};
//!
//! let spec = SynthSpec { n: 40, p: 30, s1: 3, s2: 3, theta: 0.5,
//!                        loss: LossKind::Linear, seed: 1, flip_labels: false };
//! let (data, _truth) = generate(&spec).unwrap();
//! let budget = SparsityBudget::new(3, 3).unwrap();
//! let w = WeightConfig::from_budget(budget);
//! let report = solve(&data, &w, budget, &SolverOptions::default()).unwrap();
//! assert!(report.solution.is_feasible(budget));
//! ```

pub mod cli;
pub mod error;
pub mod gpna;
mod linalg;
pub mod metrics;
pub mod model;
pub mod optimality;
pub mod oracle;
pub mod projection;
pub mod synthdata;

pub use error::{Result, SclError};
pub use gpna::{solve, SolverOptions, SolverReport, Termination};
pub use metrics::{ccv, cer, mse};
pub use model::{Iterate, LossKind, ProblemData, SparsityBudget, WeightConfig};
pub use optimality::{check_alpha_stationary, check_local_min, StationarityVerdict};
pub use projection::{project_pair, project_sparse};
pub use synthdata::{generate, GroundTruth, SynthSpec};
