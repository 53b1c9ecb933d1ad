//! Grid sweeps over synthetic instances.

use std::path::Path;
use std::time::Instant;

use itertools::iproduct;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SclError};
use crate::gpna::{solve, SolverOptions};
use crate::metrics::{ccv, cer, mse};
use crate::model::{LossKind, SparsityBudget, WeightConfig};
use crate::synthdata::{generate, SynthSpec};

/// Env var capping the number of bench worker threads.
pub const THREADS_ENV: &str = "SCL_THREADS";

fn default_loss() -> LossKind {
    LossKind::Logistic
}

fn default_base_seed() -> u64 {
    1
}

/// Grid description, read from JSON. Every combination of the list-valued
/// fields is one cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub theta: Vec<f64>,
    pub s1: Vec<usize>,
    pub s2: Vec<usize>,
    pub n: Vec<usize>,
    pub p: Vec<usize>,
    pub repetitions: usize,
    /// Explicit per-repetition seeds, shared by all cells.
    #[serde(default)]
    pub seeds: Option<Vec<u64>>,
    /// Seeds otherwise run `base_seed + cell·repetitions + rep`.
    #[serde(default = "default_base_seed")]
    pub base_seed: u64,
    #[serde(default = "default_loss")]
    pub loss: LossKind,
    #[serde(default)]
    pub flip_labels: bool,
}

/// One grid cell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub n: usize,
    pub p: usize,
    pub theta: f64,
    pub s1: usize,
    pub s2: usize,
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        let empty = [
            self.theta.is_empty(),
            self.s1.is_empty(),
            self.s2.is_empty(),
            self.n.is_empty(),
            self.p.is_empty(),
        ];
        if empty.iter().any(|&e| e) || self.repetitions == 0 {
            return Err(SclError::InvalidArgument(
                "bench grid needs non-empty lists and at least one repetition".into(),
            ));
        }
        if let Some(seeds) = &self.seeds {
            if seeds.len() < self.repetitions {
                return Err(SclError::InvalidArgument(format!(
                    "{} seeds given for {} repetitions",
                    seeds.len(),
                    self.repetitions
                )));
            }
        }
        Ok(())
    }

    /// Cells in row-major order over `n × p × θ × s1 × s2`.
    pub fn cells(&self) -> Vec<Cell> {
        iproduct!(&self.n, &self.p, &self.theta, &self.s1, &self.s2)
            .map(|(&n, &p, &theta, &s1, &s2)| Cell { n, p, theta, s1, s2 })
            .collect()
    }

    pub fn seed(&self, cell: usize, rep: usize) -> u64 {
        match &self.seeds {
            Some(seeds) => seeds[rep],
            None => self.base_seed.wrapping_add((cell * self.repetitions + rep) as u64),
        }
    }
}

/// One solved instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub cell: usize,
    pub rep: usize,
    pub n: usize,
    pub p: usize,
    pub theta: f64,
    pub s1: usize,
    pub s2: usize,
    pub seed: u64,
    /// CER for logistic runs, MSE for linear runs.
    pub error: f64,
    pub ccv: f64,
    pub time_secs: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Per-cell means of [`BenchRow`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub cell: usize,
    pub n: usize,
    pub p: usize,
    pub theta: f64,
    pub s1: usize,
    pub s2: usize,
    pub runs: usize,
    pub error: f64,
    pub ccv: f64,
    pub time_secs: f64,
    pub iterations: f64,
}

fn run_one(cfg: &BenchConfig, opts: &SolverOptions, idx: usize, cell: Cell, rep: usize) -> Result<BenchRow> {
    let seed = cfg.seed(idx, rep);
    let spec = SynthSpec {
        n: cell.n,
        p: cell.p,
        s1: cell.s1,
        s2: cell.s2,
        theta: cell.theta,
        loss: cfg.loss,
        seed,
        flip_labels: cfg.flip_labels,
    };
    let (data, _) = generate(&spec)?;
    let budget = SparsityBudget::new(cell.s1, cell.s2)?;
    let w = WeightConfig::from_budget(budget);
    let start = Instant::now();
    let report = solve(&data, &w, budget, opts)?;
    let time_secs = start.elapsed().as_secs_f64();
    let error = match cfg.loss {
        LossKind::Logistic => cer(&data, &report.solution)?,
        LossKind::Linear => mse(&data, &report.solution)?,
    };
    Ok(BenchRow {
        cell: idx,
        rep,
        n: cell.n,
        p: cell.p,
        theta: cell.theta,
        s1: cell.s1,
        s2: cell.s2,
        seed,
        error,
        ccv: ccv(&data, &report.solution)?,
        time_secs,
        iterations: report.iterations(),
        converged: report.termination == crate::gpna::Termination::TolReached,
    })
}

fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
}

/// Solves every `(cell, repetition)` pair; rows come back sorted by cell then
/// repetition regardless of scheduling.
pub fn run_bench(cfg: &BenchConfig, opts: &SolverOptions) -> Result<Vec<BenchRow>> {
    cfg.validate()?;
    opts.validate()?;
    let cells = cfg.cells();
    let jobs: Vec<(usize, Cell, usize)> = cells
        .iter()
        .enumerate()
        .flat_map(|(i, &c)| (0..cfg.repetitions).map(move |r| (i, c, r)))
        .collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = thread_cap() {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| SclError::InvalidArgument(format!("thread pool: {e}")))?;
    let mut rows = pool.install(|| {
        jobs.par_iter()
            .map(|&(i, c, r)| run_one(cfg, opts, i, c, r))
            .collect::<Result<Vec<_>>>()
    })?;
    rows.sort_by_key(|r| (r.cell, r.rep));
    Ok(rows)
}

/// Means per cell, in cell order.
pub fn aggregate(rows: &[BenchRow]) -> Vec<Aggregate> {
    let mut out: Vec<Aggregate> = Vec::new();
    for chunk in rows.chunk_by(|a, b| a.cell == b.cell) {
        let k = chunk.len() as f64;
        let mean = |f: fn(&BenchRow) -> f64| chunk.iter().map(f).sum::<f64>() / k;
        let first = &chunk[0];
        out.push(Aggregate {
            cell: first.cell,
            n: first.n,
            p: first.p,
            theta: first.theta,
            s1: first.s1,
            s2: first.s2,
            runs: chunk.len(),
            error: mean(|r| r.error),
            ccv: mean(|r| r.ccv),
            time_secs: mean(|r| r.time_secs),
            iterations: mean(|r| r.iterations as f64),
        });
    }
    out
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| SclError::Parse(format!("{}: {e}", path.display())))?;
    for r in rows {
        w.serialize(r).map_err(|e| SclError::Parse(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `detail.csv` and `means.csv` into `dir`.
pub fn write_bench(dir: &Path, rows: &[BenchRow]) -> Result<Vec<Aggregate>> {
    std::fs::create_dir_all(dir)?;
    let means = aggregate(rows);
    write_csv(&dir.join("detail.csv"), rows)?;
    write_csv(&dir.join("means.csv"), &means)?;
    Ok(means)
}
