//! Fit a sparse two-view logistic model on synthetic data and report the
//! solver trace, classification error and support recovery.
//!
//!     cargo run --release --example solve_logistic -- [n] [p] [s] [seed]

use scl::{ccv, cer, generate, solve, LossKind, SolverOptions, SparsityBudget, SynthSpec, WeightConfig};

fn arg<T: std::str::FromStr>(i: usize, default: T) -> T {
    std::env::args().nth(i).and_then(|a| a.parse().ok()).unwrap_or(default)
}

fn main() -> scl::Result<()> {
    let (n, p, s, seed) = (arg(1, 200), arg(2, 1000), arg(3, 10), arg(4, 1u64));
    // Flipped labels make y = 1 the likely class where the margins are
    // positive, so the generating coefficients are a sensible reference.
    let spec = SynthSpec {
        n,
        p,
        s1: s,
        s2: s,
        theta: 0.5,
        loss: LossKind::Logistic,
        seed,
        flip_labels: true,
    };
    let (data, truth) = generate(&spec)?;
    let budget = SparsityBudget::new(s, s)?;
    let w = WeightConfig::from_budget(budget);

    let report = solve(&data, &w, budget, &SolverOptions::default())?;
    println!(
        "{:>4} {:>14} {:>9} {:>20} {:>7} {:>10}",
        "k", "objective", "alpha", "step", "gate", "tol"
    );
    for r in &report.trace {
        println!(
            "{:>4} {:>14.8} {:>9.3e} {:>20} {:>7} {:>10.3e}",
            r.k,
            r.objective,
            r.alpha,
            format!("{:?}", r.step),
            format!("{:?}", r.gate),
            r.tol
        );
    }
    println!(
        "termination: {:?} after {} iterations",
        report.termination,
        report.iterations()
    );

    let sol = &report.solution;
    let hits = |found: &[usize], true_: &[usize]| found.iter().filter(|j| true_.contains(j)).count();
    println!("CER {:.4}  CCV {:.3e}", cer(&data, sol)?, ccv(&data, sol)?);
    println!("CER of generating coefficients {:.4}", cer(&data, &truth.to_iterate())?);
    println!(
        "support overlap with truth: view 1 {}/{s}, view 2 {}/{s}",
        hits(sol.support1(), &truth.support1),
        hits(sol.support2(), &truth.support2)
    );
    Ok(())
}
