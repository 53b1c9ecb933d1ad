//! Command-line front end: `generate`, `fit`, `eval`, `bench`.
//!
//! Each subcommand is also callable as a function so examples and tests can
//! drive the same code paths without spawning a process. Exit codes: 0 on
//! success, 2 for usage and validation errors, 3 for numeric failures.

pub mod bench;
pub mod io;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SclError};
use crate::gpna::{solve, SolverOptions, Termination};
use crate::metrics::{ccv, cer, mse};
use crate::model::{objective, LossKind, ProblemData, SparsityBudget, WeightConfig};
use crate::synthdata::{generate, split_indices, SynthSpec};

use self::bench::{run_bench, write_bench, BenchConfig};
use self::io::{
    read_json, read_problem, write_json, write_problem, write_trace, SolutionFile, SOLUTION_FILE, SPEC_FILE,
    SUMMARY_FILE, TRACE_FILE, TRUTH_FILE,
};

#[derive(Debug, Parser)]
#[command(name = "scl", version, about = "Sparse collaborative learning solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a synthetic instance and write it to a directory.
    Generate(GenerateArgs),
    /// Fit a data directory and write solution, trace and summary.
    Fit(FitArgs),
    /// Print metrics of a solution as JSON.
    Eval(EvalArgs),
    /// Run a grid sweep described by a JSON config.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub s1: usize,
    #[arg(long)]
    pub s2: usize,
    #[arg(long, default_value_t = 0.0)]
    pub theta: f64,
    #[arg(long, default_value = "logistic")]
    pub loss: LossKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub flip_labels: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub eps_stop: Option<f64>,
    #[arg(long)]
    pub eps_gate: Option<f64>,
    #[arg(long)]
    pub alpha0: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
}

impl SolverArgs {
    pub fn options(&self) -> SolverOptions {
        let d = SolverOptions::default();
        SolverOptions {
            sigma: self.sigma.unwrap_or(d.sigma),
            epsilon_stop: self.eps_stop.unwrap_or(d.epsilon_stop),
            epsilon_gate: self.eps_gate.unwrap_or(d.epsilon_gate),
            alpha0: self.alpha0.unwrap_or(d.alpha0),
            gamma: self.gamma.unwrap_or(d.gamma),
            max_iter: self.max_iter.unwrap_or(d.max_iter),
            ..d
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SplitArgs {
    /// Hold out this fraction of rows (rounded) as a test set.
    #[arg(long)]
    pub test_frac: Option<f64>,
    /// Seed of the row split.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl SplitArgs {
    /// `(train, test)` row indices, or `None` without a split.
    fn indices(&self, n: usize) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
        let Some(frac) = self.test_frac else {
            return Ok(None);
        };
        if !(frac > 0.0 && frac < 1.0) {
            return Err(SclError::InvalidArgument(format!(
                "test fraction must lie in (0, 1), got {frac}"
            )));
        }
        let n_test = (frac * n as f64).round() as usize;
        split_indices(n, n_test, self.seed).map(Some)
    }
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    /// Directory holding X.csv, Z.csv, y.csv.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub s1: usize,
    #[arg(long)]
    pub s2: usize,
    /// Defaults to the loss in spec.json.
    #[arg(long)]
    pub loss: Option<LossKind>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub split: SplitArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub solution: PathBuf,
    #[arg(long)]
    pub loss: Option<LossKind>,
    #[command(flatten)]
    pub split: SplitArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
}

/// Metrics of one solution on one set of rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub loss: LossKind,
    /// `all`, `train` or `test`.
    pub subset: String,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cer: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mse: Option<f64>,
    pub ccv: f64,
}

fn evaluate(data: &ProblemData, sol: &crate::model::Iterate, subset: &str) -> Result<EvalReport> {
    let (c, m) = match data.loss() {
        LossKind::Logistic => (Some(cer(data, sol)?), None),
        LossKind::Linear => (None, Some(mse(data, sol)?)),
    };
    Ok(EvalReport {
        loss: data.loss(),
        subset: subset.to_string(),
        n: data.n(),
        cer: c,
        mse: m,
        ccv: ccv(data, sol)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSummary {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Contents of `summary.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub loss: LossKind,
    pub s1: usize,
    pub s2: usize,
    pub weights: WeightSummary,
    pub options: SolverOptions,
    pub termination: Termination,
    pub iterations: usize,
    pub initial_objective: f64,
    pub final_objective: f64,
    pub final_tol: f64,
    pub train: EvalReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test: Option<EvalReport>,
    /// Seconds spent inside the solver, excluding I/O.
    pub wall_time_secs: f64,
}

fn prepare_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

/// Writes `X.csv`, `Z.csv`, `y.csv`, `truth.json` and `spec.json`.
pub fn cmd_generate(args: &GenerateArgs) -> Result<SynthSpec> {
    let spec = SynthSpec {
        n: args.n,
        p: args.p,
        s1: args.s1,
        s2: args.s2,
        theta: args.theta,
        loss: args.loss,
        seed: args.seed,
        flip_labels: args.flip_labels,
    };
    let (data, truth) = generate(&spec)?;
    prepare_dir(&args.out)?;
    write_problem(&args.out, &data)?;
    write_json(&args.out.join(TRUTH_FILE), &truth)?;
    write_json(&args.out.join(SPEC_FILE), &spec)?;
    Ok(spec)
}

/// Weights from the flags, each missing one taken from the budget default.
pub fn resolve_weights(a: Option<f64>, b: Option<f64>, c: Option<f64>, budget: SparsityBudget) -> Result<WeightConfig> {
    let d = WeightConfig::from_budget(budget);
    WeightConfig::new(a.unwrap_or(d.a()), b.unwrap_or(d.b()), c.unwrap_or(d.c()))
}

/// Fits a data directory and writes `solution.json`, `trace.csv` and
/// `summary.json` into `args.out`.
pub fn cmd_fit(args: &FitArgs) -> Result<FitSummary> {
    let full = read_problem(&args.data, args.loss)?;
    let split = args.split.indices(full.n())?;
    let (train, test) = match &split {
        Some((tr, te)) => (full.select_rows(tr)?, Some(full.select_rows(te)?)),
        None => (full, None),
    };
    let budget = SparsityBudget::new(args.s1, args.s2)?;
    budget.check(train.p1(), train.p2())?;
    let w = resolve_weights(args.a, args.b, args.c, budget)?;
    let opts = args.solver.options();

    let start = Instant::now();
    let report = solve(&train, &w, budget, &opts)?;
    let wall_time_secs = start.elapsed().as_secs_f64();

    let sol = &report.solution;
    let summary = FitSummary {
        loss: train.loss(),
        s1: args.s1,
        s2: args.s2,
        weights: WeightSummary {
            a: w.a(),
            b: w.b(),
            c: w.c(),
        },
        options: opts.clone(),
        termination: report.termination,
        iterations: report.iterations(),
        initial_objective: report.initial_objective,
        final_objective: objective(&train, &w, sol)?,
        final_tol: report.final_tol,
        train: evaluate(&train, sol, if test.is_some() { "train" } else { "all" })?,
        test: test.as_ref().map(|t| evaluate(t, sol, "test")).transpose()?,
        wall_time_secs,
    };

    prepare_dir(&args.out)?;
    write_json(&args.out.join(SOLUTION_FILE), &SolutionFile::from(sol))?;
    write_trace(&args.out.join(TRACE_FILE), &report.trace)?;
    write_json(&args.out.join(SUMMARY_FILE), &summary)?;
    Ok(summary)
}

/// Metrics of a stored solution on all rows, or on the test rows of a split.
pub fn cmd_eval(args: &EvalArgs) -> Result<EvalReport> {
    let data = read_problem(&args.data, args.loss)?;
    let sol = read_json::<SolutionFile>(&args.solution)?.to_iterate();
    if sol.p1() != data.p1() || sol.p2() != data.p2() {
        return Err(SclError::DimensionMismatch(format!(
            "solution has blocks ({}, {}), data has ({}, {})",
            sol.p1(),
            sol.p2(),
            data.p1(),
            data.p2()
        )));
    }
    match args.split.indices(data.n())? {
        Some((_, test)) => evaluate(&data.select_rows(&test)?, &sol, "test"),
        None => evaluate(&data, &sol, "all"),
    }
}

/// Runs the grid in `args.config`; writes `detail.csv` and `means.csv`.
pub fn cmd_bench(args: &BenchArgs) -> Result<Vec<bench::Aggregate>> {
    let cfg: BenchConfig = read_json(&args.config)?;
    let rows = run_bench(&cfg, &args.solver.options())?;
    write_bench(&args.out, &rows)
}

/// Dispatches a parsed command; returns the JSON printed on stdout.
pub fn run(cli: &Cli) -> Result<String> {
    let json = match &cli.command {
        Command::Generate(a) => serde_json::to_string_pretty(&cmd_generate(a)?)?,
        Command::Fit(a) => serde_json::to_string_pretty(&cmd_fit(a)?)?,
        Command::Eval(a) => serde_json::to_string_pretty(&cmd_eval(a)?)?,
        Command::Bench(a) => serde_json::to_string_pretty(&cmd_bench(a)?)?,
    };
    Ok(json)
}
