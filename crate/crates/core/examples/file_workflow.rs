//! The generate, fit, eval pipeline through the file formats, without the
//! binary. Outputs go to a fresh directory under the system temp dir.

use scl::cli::{cmd_eval, cmd_fit, cmd_generate, EvalArgs, FitArgs, GenerateArgs, SolverArgs, SplitArgs};
use scl::LossKind;

fn main() -> scl::Result<()> {
    let root = std::env::temp_dir().join(format!("scl-workflow-{}", std::process::id()));
    let data = root.join("data");
    let fit = root.join("fit");

    cmd_generate(&GenerateArgs {
        n: 120,
        p: 60,
        s1: 4,
        s2: 4,
        theta: 0.5,
        loss: LossKind::Linear,
        seed: 9,
        flip_labels: false,
        out: data.clone(),
    })?;

    let split = SplitArgs {
        test_frac: Some(0.25),
        seed: 1,
    };
    let summary = cmd_fit(&FitArgs {
        data: data.clone(),
        out: fit.clone(),
        s1: 4,
        s2: 4,
        loss: None,
        a: None,
        b: None,
        c: None,
        solver: SolverArgs {
            sigma: None,
            eps_stop: Some(1e-8),
            eps_gate: None,
            alpha0: None,
            gamma: None,
            max_iter: None,
        },
        split: split.clone(),
    })?;
    println!("{}", serde_json::to_string_pretty(&summary)?);

    let eval = cmd_eval(&EvalArgs {
        data,
        solution: fit.join(scl::cli::io::SOLUTION_FILE),
        loss: None,
        split,
    })?;
    println!("held-out: {}", serde_json::to_string(&eval)?);
    println!("files written under {}", root.display());
    Ok(())
}
