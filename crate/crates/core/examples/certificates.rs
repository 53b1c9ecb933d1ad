//! Check a solver output against the first-order optimality conditions.

use scl::model::{gradient, smoothness_constant};
use scl::optimality::default_tolerance;
use scl::{
    check_alpha_stationary, check_local_min, generate, solve, LossKind, SolverOptions, SparsityBudget, SynthSpec,
    WeightConfig,
};

fn main() -> scl::Result<()> {
    let spec = SynthSpec {
        n: 150,
        p: 80,
        s1: 4,
        s2: 4,
        theta: 0.5,
        loss: LossKind::Logistic,
        seed: 12,
        flip_labels: false,
    };
    let (data, _) = generate(&spec)?;
    let budget = SparsityBudget::new(4, 4)?;
    let w = WeightConfig::from_budget(budget);
    let report = solve(&data, &w, budget, &SolverOptions::default())?;
    let beta = &report.solution;

    let tol = default_tolerance(&gradient(&data, &w, beta)?).max(10.0 * report.final_tol);
    let local = check_local_min(&data, &w, beta, budget, tol)?;
    println!(
        "local-minimizer conditions: {} (violation {:.3e})",
        local.is_local_min_condition, local.max_violation
    );
    println!("largest alpha consistent with them: {:.3e}", local.alpha_used);

    let lf = smoothness_constant(&data, &w)?;
    for frac in [0.1, 0.5, 0.9] {
        let v = check_alpha_stationary(&data, &w, beta, budget, frac / lf, tol)?;
        println!(
            "alpha = {frac}/L_f: stationary {} (violation {:.3e}, projection gap {:.3e})",
            v.is_alpha_stationary, v.max_violation, v.projection_gap
        );
    }
    Ok(())
}
