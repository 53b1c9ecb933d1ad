//! Hard-thresholding projections onto `Σ_s = {v : ‖v‖₀ ≤ s}` and onto the
//! product set `Σ₁ × Σ₂`.
//!
//! At magnitude ties the Euclidean projection is not unique. The kept set then
//! prefers smaller indices so every call is deterministic.

use std::cmp::Ordering;

use ndarray::{Array1, ArrayView1};

use crate::error::{Result, SclError};
use crate::model::{Iterate, SparsityBudget};

/// Outcome of a single-block projection.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionResult {
    /// Projected point.
    pub vector: Array1<f64>,
    /// Retained indices, ascending.
    pub kept: Vec<usize>,
    /// The s-th and (s+1)-th largest magnitudes were equal and nonzero, so
    /// the smallest-index rule picked among equally near points.
    pub tie_broken: bool,
}

/// Larger magnitude first, then smaller index.
fn by_magnitude(v: &ArrayView1<f64>, i: usize, j: usize) -> Ordering {
    v[j].abs().total_cmp(&v[i].abs()).then(i.cmp(&j))
}

/// Keeps the `s` largest-magnitude entries of `v` and zeroes the rest.
pub fn project_sparse(v: ArrayView1<f64>, s: usize) -> Result<ProjectionResult> {
    let p = v.len();
    if s > p {
        return Err(SclError::InvalidArgument(format!(
            "sparsity level {s} exceeds dimension {p}"
        )));
    }
    if s == p {
        return Ok(ProjectionResult {
            vector: v.to_owned(),
            kept: (0..p).collect(),
            tie_broken: false,
        });
    }

    let mut order: Vec<usize> = (0..p).collect();
    // After this call order[..s] holds the top s entries and order[s] is the
    // best of the rest.
    order.select_nth_unstable_by(s, |&i, &j| by_magnitude(&v, i, j));

    let mut kept = order[..s].to_vec();
    kept.sort_unstable();

    let runner_up = v[order[s]].abs();
    let smallest_kept = kept.iter().map(|&i| v[i].abs()).fold(f64::INFINITY, f64::min);
    let tie_broken = s > 0 && runner_up > 0.0 && smallest_kept == runner_up;

    let mut vector = Array1::zeros(p);
    for &i in &kept {
        vector[i] = v[i];
    }
    Ok(ProjectionResult {
        vector,
        kept,
        tie_broken,
    })
}

/// Projects the two blocks independently with budgets `s₁` and `s₂`.
pub fn project_pair(beta1: ArrayView1<f64>, beta2: ArrayView1<f64>, budget: SparsityBudget) -> Result<Iterate> {
    let first = project_sparse(beta1, budget.s1())?;
    let second = project_sparse(beta2, budget.s2())?;
    Ok(Iterate::new(first.vector, second.vector))
}

/// [`project_pair`] on a stacked vector split after `p1` entries.
pub fn project_stacked(v: ArrayView1<f64>, p1: usize, budget: SparsityBudget) -> Result<Iterate> {
    if p1 > v.len() {
        return Err(SclError::DimensionMismatch(format!(
            "cannot split vector of length {} at {p1}",
            v.len()
        )));
    }
    project_pair(v.slice(ndarray::s![..p1]), v.slice(ndarray::s![p1..]), budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn keeps_top_magnitudes() {
        let r = project_sparse(array![3.0, 1.0, -2.0].view(), 2).unwrap();
        assert_eq!(r.vector, array![3.0, 0.0, -2.0]);
        assert_eq!(r.kept, vec![0, 2]);
        assert!(!r.tie_broken);
    }

    #[test]
    fn full_budget_is_identity() {
        let v = array![0.5, -7.0, 0.0, 2.0];
        let r = project_sparse(v.view(), 4).unwrap();
        assert_eq!(r.vector, v);
        assert!(!r.tie_broken);
    }

    #[test]
    fn ties_prefer_smaller_indices() {
        let r = project_sparse(array![1.0, -1.0, 1.0].view(), 2).unwrap();
        assert_eq!(r.vector, array![1.0, -1.0, 0.0]);
        assert!(r.tie_broken);
    }

    #[test]
    fn zero_ties_are_not_reported() {
        let r = project_sparse(array![0.0, 4.0, 0.0, 0.0].view(), 2).unwrap();
        assert_eq!(r.vector, array![0.0, 4.0, 0.0, 0.0]);
        assert!(!r.tie_broken);
    }

    #[test]
    fn zero_budget_gives_zero() {
        let r = project_sparse(array![1.0, 2.0].view(), 0).unwrap();
        assert_eq!(r.vector, array![0.0, 0.0]);
        assert!(r.kept.is_empty());
    }

    #[test]
    fn oversized_budget_is_rejected() {
        assert!(project_sparse(array![1.0].view(), 2).is_err());
    }

    #[test]
    fn pair_projection_basics() {
        let budget = SparsityBudget::new(1, 2).unwrap();
        let z = project_pair(Array1::zeros(3).view(), Array1::zeros(3).view(), budget).unwrap();
        assert_eq!(z, Iterate::zeros(3, 3));

        let inside = Iterate::new(array![0.0, 2.0, 0.0], array![1.0, 0.0, -1.0]);
        let again = project_pair(inside.beta1().view(), inside.beta2().view(), budget).unwrap();
        assert_eq!(again, inside);

        let st = project_stacked(array![1.0, 3.0, 2.0, 0.5, -4.0, 1.0].view(), 3, budget).unwrap();
        assert_eq!(st.support1(), &[1]);
        assert_eq!(st.support2(), &[1, 2]);
    }
}
