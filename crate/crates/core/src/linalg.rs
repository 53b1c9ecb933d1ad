//! Dense linear-algebra helpers shared by the solver and the oracle.
//!
//! Data lives in `ndarray` containers; small dense factorizations are handed to
//! `nalgebra`.

use nalgebra::{DMatrix, DVector};
use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SclError};

/// Relative change of the Rayleigh quotient at which power iteration stops.
pub const POWER_TOL: f64 = 1e-8;
/// Iteration cap for power iteration.
pub const POWER_MAX_ITER: usize = 5000;

/// Smallest admissible ratio between the smallest and largest Cholesky pivot
/// (squared). Below it the matrix is treated as singular.
const PIVOT_RATIO: f64 = 1e-14;

pub(crate) fn to_nalgebra(a: &Array2<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

/// Largest eigenvalue of a symmetric positive semidefinite operator given only
/// through matrix-vector products.
///
/// The start vector is drawn from a fixed-seed generator so results are
/// reproducible. Returns 0 for the zero operator.
pub fn power_iteration<F>(dim: usize, mut apply: F) -> Result<f64>
where
    F: FnMut(&Array1<f64>) -> Array1<f64>,
{
    if dim == 0 {
        return Ok(0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e37_79b9_7f4a_7c15);
    let mut v: Array1<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let norm = v.dot(&v).sqrt();
    v /= norm;

    let mut lambda = 0.0;
    let mut change = f64::INFINITY;
    for it in 0..POWER_MAX_ITER {
        let w = apply(&v);
        let next = v.dot(&w);
        let wnorm = w.dot(&w).sqrt();
        if wnorm == 0.0 {
            return Ok(0.0);
        }
        change = (next - lambda).abs() / next.abs().max(f64::MIN_POSITIVE);
        lambda = next;
        v = w / wnorm;
        if it > 0 && change <= POWER_TOL {
            return Ok(lambda);
        }
    }
    Err(SclError::PowerIteration {
        iterations: POWER_MAX_ITER,
        last_change: change,
    })
}

/// Solves `h x = rhs` for symmetric positive definite `h` by Cholesky.
///
/// Returns `None` when the factorization fails or the pivots indicate
/// numerical singularity.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn spd_solve(h: &Array2<f64>, rhs: &Array1<f64>) -> Option<Array1<f64>> {
    let dim = h.nrows();
    if dim == 0 {
        return Some(Array1::zeros(0));
    }
    let chol = to_nalgebra(h).cholesky()?;
    let l = chol.l_dirty();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for i in 0..dim {
        let d = l[(i, i)];
        lo = lo.min(d);
        hi = hi.max(d);
    }
    if !(lo > 0.0) || (lo / hi).powi(2) < PIVOT_RATIO {
        return None;
    }
    let b = DVector::from_iterator(dim, rhs.iter().copied());
    let x = chol.solve(&b);
    if x.iter().all(|v| v.is_finite()) {
        Some(x.iter().copied().collect())
    } else {
        None
    }
}

/// Eigenvalues of a dense symmetric matrix in ascending order.
pub fn symmetric_eigenvalues(a: &Array2<f64>) -> Vec<f64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let eig = to_nalgebra(a).symmetric_eigen();
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|x, y| x.total_cmp(y));
    vals
}

/// Numerical column rank with threshold `rel_tol * sigma_max`.
pub fn column_rank(a: &Array2<f64>, rel_tol: f64) -> usize {
    if a.ncols() == 0 || a.nrows() == 0 {
        return 0;
    }
    let sv = to_nalgebra(a).singular_values();
    let smax = sv.iter().copied().fold(0.0_f64, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

/// Minimum-norm least-squares solution of `a x = b` via SVD.
pub fn lstsq(a: &Array2<f64>, b: &Array1<f64>) -> Option<Array1<f64>> {
    let svd = to_nalgebra(a).svd(true, true);
    let rhs = DVector::from_iterator(b.len(), b.iter().copied());
    let eps = 1e-12 * svd.singular_values.max();
    let x = svd.solve(&rhs, eps).ok()?;
    Some(x.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn power_iteration_matches_dense_eigensolve() {
        let a = array![[4.0, 1.0, 0.5], [1.0, 3.0, 0.2], [0.5, 0.2, 1.0]];
        let dense = *symmetric_eigenvalues(&a).last().unwrap();
        let est = power_iteration(3, |v| a.dot(v)).unwrap();
        assert!((est - dense).abs() / dense < 1e-6);
    }

    #[test]
    fn power_iteration_zero_operator() {
        assert_eq!(power_iteration(4, |v| Array1::zeros(v.len())).unwrap(), 0.0);
    }

    #[test]
    fn spd_solve_rejects_singular() {
        let h = array![[1.0, 1.0], [1.0, 1.0]];
        assert!(spd_solve(&h, &array![1.0, 0.0]).is_none());
        let h = array![[2.0, 0.5], [0.5, 1.0]];
        let x = spd_solve(&h, &array![1.0, 2.0]).unwrap();
        let r = h.dot(&x) - array![1.0, 2.0];
        assert!(r.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn rank_of_duplicate_columns() {
        let a = array![[1.0, 1.0, 0.0], [2.0, 2.0, 1.0], [3.0, 3.0, 0.0]];
        assert_eq!(column_rank(&a, 1e-10), 2);
    }
}
