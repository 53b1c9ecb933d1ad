//! Sparse two-view least squares on a noiseless instance. Once the support
//! settles, a single Newton step solves the restricted problem exactly.
//!
//!     cargo run --release --example solve_linear

use scl::gpna::StepKind;
use scl::{generate, mse, solve, LossKind, SolverOptions, SparsityBudget, SynthSpec, WeightConfig};

fn main() -> scl::Result<()> {
    let spec = SynthSpec {
        n: 100,
        p: 300,
        s1: 5,
        s2: 5,
        theta: 0.0,
        loss: LossKind::Linear,
        seed: 4,
        flip_labels: false,
    };
    let (data, _) = generate(&spec)?;
    let budget = SparsityBudget::new(5, 5)?;
    let w = WeightConfig::from_budget(budget);
    let opts = SolverOptions {
        epsilon_stop: 1e-10,
        ..SolverOptions::default()
    };
    let report = solve(&data, &w, budget, &opts)?;

    for r in &report.trace {
        let newton = if r.step == StepKind::GradientPlusNewton {
            "newton"
        } else {
            ""
        };
        println!("k={:<3} f={:.12e} tol={:.3e} {newton}", r.k, r.objective, r.tol);
    }
    println!(
        "termination {:?}, final tol {:.3e}",
        report.termination, report.final_tol
    );
    println!("MSE {:.6}", mse(&data, &report.solution)?);
    println!("support 1 {:?}", report.solution.support1());
    println!("support 2 {:?}", report.solution.support2());
    Ok(())
}
