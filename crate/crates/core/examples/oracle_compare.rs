//! Compare the solver with exhaustive support enumeration on tiny instances.

use scl::oracle::{global_solve_bruteforce, restricted_convexity_constant};
use scl::{generate, solve, LossKind, SolverOptions, SparsityBudget, SynthSpec, WeightConfig};

fn main() -> scl::Result<()> {
    let budget = SparsityBudget::new(2, 2)?;
    let w = WeightConfig::from_budget(budget);
    let mut matched = 0;
    let runs = 20;
    for seed in 0..runs {
        let spec = SynthSpec {
            n: 20,
            p: 6,
            s1: 2,
            s2: 2,
            theta: 0.3,
            loss: LossKind::Linear,
            seed,
            flip_labels: false,
        };
        let (data, _) = generate(&spec)?;
        let oracle = global_solve_bruteforce(&data, &w, budget)?;
        let report = solve(&data, &w, budget, &SolverOptions::default())?;
        let gap = report.final_objective() - oracle.value;
        matched += usize::from(gap <= 1e-6);
        let lf = restricted_convexity_constant(&data, &w, budget)?.value;
        println!(
            "seed {seed:>2}: global {:.6}  solver {:.6}  gap {gap:.2e}  l_f {lf:.3e}",
            oracle.value,
            report.final_objective()
        );
    }
    println!("solver reached the global value on {matched}/{runs} instances");
    Ok(())
}
