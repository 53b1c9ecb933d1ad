//! Generate data, rescale features, split rows and score a fit on held-out
//! samples.

use scl::synthdata::{random_split, scale_features};
use scl::{ccv, cer, generate, solve, LossKind, ProblemData, SolverOptions, SparsityBudget, SynthSpec, WeightConfig};

fn main() -> scl::Result<()> {
    let spec = SynthSpec {
        n: 300,
        p: 200,
        s1: 8,
        s2: 8,
        theta: 0.8,
        loss: LossKind::Logistic,
        seed: 21,
        flip_labels: true,
    };
    let (raw, truth) = generate(&spec)?;
    println!("true supports {:?} / {:?}", truth.support1, truth.support2);

    // Features mapped column-wise onto [-1, 1], as one would for real data.
    let data = ProblemData::new(
        scale_features(raw.x()),
        scale_features(raw.z()),
        raw.y().clone(),
        raw.loss(),
    )?;
    let (train, test) = random_split(&data, 60, 3)?;

    let budget = SparsityBudget::new(8, 8)?;
    let w = WeightConfig::from_budget(budget);
    let report = solve(&train, &w, budget, &SolverOptions::default())?;
    let sol = &report.solution;
    println!(
        "train: n={} CER {:.3} CCV {:.3e}",
        train.n(),
        cer(&train, sol)?,
        ccv(&train, sol)?
    );
    println!(
        "test:  n={} CER {:.3} CCV {:.3e}",
        test.n(),
        cer(&test, sol)?,
        ccv(&test, sol)?
    );
    Ok(())
}
