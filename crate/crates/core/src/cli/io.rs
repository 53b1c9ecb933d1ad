//! On-disk formats.
//!
//! `X.csv`, `Z.csv` and `y.csv` are headerless, row-major, UTF-8 with LF line
//! endings; every value is written with 17 significant digits so reading a
//! file back reproduces the in-memory matrix bit for bit. Metadata lives in
//! sibling JSON files.

use std::fs;
use std::io::Write;
use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SclError};
use crate::gpna::IterationRecord;
use crate::model::{Iterate, LossKind, ProblemData};
use crate::synthdata::SynthSpec;

pub const X_FILE: &str = "X.csv";
pub const Z_FILE: &str = "Z.csv";
pub const Y_FILE: &str = "y.csv";
pub const SPEC_FILE: &str = "spec.json";
pub const TRUTH_FILE: &str = "truth.json";
pub const SOLUTION_FILE: &str = "solution.json";
pub const TRACE_FILE: &str = "trace.csv";
pub const SUMMARY_FILE: &str = "summary.json";

fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

fn with_path<T>(path: &Path, r: std::io::Result<T>) -> Result<T> {
    r.map_err(|e| SclError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

pub fn write_matrix(path: &Path, m: &Array2<f64>) -> Result<()> {
    let mut out = String::with_capacity(m.len() * 24);
    for row in m.rows() {
        let line: Vec<String> = row.iter().map(|&v| fmt_value(v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    with_path(path, fs::write(path, out))
}

pub fn write_vector(path: &Path, v: &Array1<f64>) -> Result<()> {
    let mut out = String::with_capacity(v.len() * 24);
    for &x in v {
        out.push_str(&fmt_value(x));
        out.push('\n');
    }
    with_path(path, fs::write(path, out))
}

fn read_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)
        .map_err(|e| SclError::Parse(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| SclError::Parse(format!("{}: {e}", path.display())))?;
        let row = record
            .iter()
            .map(|field| {
                field
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| SclError::Parse(format!("{}:{}: '{field}': {e}", path.display(), line + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn read_matrix(path: &Path) -> Result<Array2<f64>> {
    let rows = read_rows(path)?;
    let ncols = rows.first().map_or(0, Vec::len);
    if let Some((i, _)) = rows.iter().enumerate().find(|(_, r)| r.len() != ncols) {
        return Err(SclError::Parse(format!(
            "{}: row {} has a different number of columns",
            path.display(),
            i + 1
        )));
    }
    let nrows = rows.len();
    Array2::from_shape_vec((nrows, ncols), rows.into_iter().flatten().collect())
        .map_err(|e| SclError::Parse(e.to_string()))
}

pub fn read_vector(path: &Path) -> Result<Array1<f64>> {
    let rows = read_rows(path)?;
    if rows.iter().any(|r| r.len() != 1) {
        return Err(SclError::Parse(format!(
            "{}: expected one value per line",
            path.display()
        )));
    }
    Ok(rows.into_iter().flatten().collect())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    with_path(path, fs::write(path, text))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = with_path(path, fs::read_to_string(path))?;
    serde_json::from_str(&text).map_err(|e| SclError::Parse(format!("{}: {e}", path.display())))
}

/// Writes `X.csv`, `Z.csv` and `y.csv` into `dir`.
pub fn write_problem(dir: &Path, data: &ProblemData) -> Result<()> {
    write_matrix(&dir.join(X_FILE), data.x())?;
    write_matrix(&dir.join(Z_FILE), data.z())?;
    write_vector(&dir.join(Y_FILE), data.y())
}

/// Loss recorded in `dir/spec.json`, if that file exists.
pub fn recorded_loss(dir: &Path) -> Result<Option<LossKind>> {
    let path = dir.join(SPEC_FILE);
    if !path.exists() {
        return Ok(None);
    }
    Ok(Some(read_json::<SynthSpec>(&path)?.loss))
}

/// Reads a data directory. The loss comes from `loss` or, failing that, from
/// `spec.json`.
pub fn read_problem(dir: &Path, loss: Option<LossKind>) -> Result<ProblemData> {
    let loss = match loss {
        Some(l) => l,
        None => recorded_loss(dir)?.ok_or_else(|| {
            SclError::InvalidArgument(format!("no --loss given and no {SPEC_FILE} in {}", dir.display()))
        })?,
    };
    let x = read_matrix(&dir.join(X_FILE))?;
    let z = read_matrix(&dir.join(Z_FILE))?;
    let y = read_vector(&dir.join(Y_FILE))?;
    ProblemData::new(x, z, y, loss)
}

/// Contents of `solution.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub beta1: Vec<f64>,
    pub beta2: Vec<f64>,
    pub support1: Vec<usize>,
    pub support2: Vec<usize>,
}

impl From<&Iterate> for SolutionFile {
    fn from(it: &Iterate) -> Self {
        Self {
            beta1: it.beta1().to_vec(),
            beta2: it.beta2().to_vec(),
            support1: it.support1().to_vec(),
            support2: it.support2().to_vec(),
        }
    }
}

impl SolutionFile {
    pub fn to_iterate(&self) -> Iterate {
        Iterate::new(Array1::from(self.beta1.clone()), Array1::from(self.beta2.clone()))
    }
}

/// Writes the iteration trace with header `k,objective,alpha,q,step,gate,tol`.
pub fn write_trace(path: &Path, trace: &[IterationRecord]) -> Result<()> {
    let mut out = String::from("k,objective,alpha,q,step,gate,tol\n");
    for r in trace {
        out.push_str(&format!(
            "{},{},{},{},{:?},{:?},{}\n",
            r.k,
            fmt_value(r.objective),
            fmt_value(r.alpha),
            r.backtracks,
            r.step,
            r.gate,
            fmt_value(r.tol)
        ));
    }
    let mut file = with_path(path, fs::File::create(path))?;
    with_path(path, file.write_all(out.as_bytes()))
}
