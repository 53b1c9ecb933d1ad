//! A small parameter sweep, run in parallel and averaged per grid cell.
//! Set `SCL_THREADS` to cap the worker count.

use scl::cli::bench::{aggregate, run_bench, BenchConfig};
use scl::{LossKind, SolverOptions};

fn main() -> scl::Result<()> {
    let cfg = BenchConfig {
        theta: vec![0.0, 0.5, 0.8],
        s1: vec![5],
        s2: vec![5],
        n: vec![100],
        p: vec![200, 400],
        repetitions: 5,
        seeds: None,
        base_seed: 1,
        loss: LossKind::Logistic,
        flip_labels: true,
    };
    let rows = run_bench(&cfg, &SolverOptions::default())?;
    let converged = rows.iter().filter(|r| r.converged).count();
    println!("{} runs, {converged} reached the tolerance", rows.len());
    println!(
        "{:>5} {:>5} {:>5} {:>8} {:>10} {:>10} {:>8}",
        "n", "p", "theta", "CER", "CCV", "secs", "iters"
    );
    for a in aggregate(&rows) {
        println!(
            "{:>5} {:>5} {:>5} {:>8.4} {:>10.3e} {:>10.4} {:>8.1}",
            a.n, a.p, a.theta, a.error, a.ccv, a.time_secs, a.iterations
        );
    }
    Ok(())
}
