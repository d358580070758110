//! Exact ground-truth computations: the agreement relation, the optimal
//! `km`-sparse tail error and top-`s` truncation.
//!
//! These read the signal directly and are meant for tests and reports. The
//! recovery algorithms never call into this module except for
//! [`truncate_top_s`] on their own estimates.

use crate::error::{check_dim, Error, Result};
use crate::matrix::{MatrixEntries, SignalMatrix, SparseMatrix, SparseVector};
use serde::Serialize;

/// ℓ1 mass of a matrix outside its `km` largest-magnitude entries.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct TailError(pub f64);

impl TailError {
    pub fn value(self) -> f64 {
        self.0
    }
}

pub fn l1_norm(x: &[f64]) -> Result<f64> {
    let mut sum = 0.0;
    for (i, v) in x.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::input(format!("non-finite entry at index {i}")));
        }
        sum += v.abs();
    }
    Ok(sum)
}

/// `u` agrees with `v` when `supp(u) ⊆ supp(v)` and the two coincide on
/// `supp(u)`. The relation is not symmetric.
pub fn agrees(u: &SparseVector, v: &[f64]) -> Result<bool> {
    check_dim(v.len(), u.dim())?;
    Ok(u.entries().iter().all(|&(i, x)| v[i] != 0.0 && v[i] == x))
}

/// Optimal tail error for sparsity budget `k` per column on average.
pub fn optimal_tail_error(a: &SignalMatrix, k: usize) -> Result<TailError> {
    if k < 1 || k > a.n() {
        return Err(Error::input(format!(
            "k must lie in [1, {}], got {k}",
            a.n()
        )));
    }
    let keep = k * a.m();
    let mut mags: Vec<f64> = a.as_col_major().iter().map(|v| v.abs()).collect();
    let total = mags.len();
    if keep >= total {
        return Ok(TailError(0.0));
    }
    // Partition so the `total - keep` smallest magnitudes come first.
    let split = total - keep;
    mags.select_nth_unstable_by(split - 1, |x, y| x.total_cmp(y));
    let mut tail = mags[..split].to_vec();
    tail.sort_by(|x, y| x.total_cmp(y));
    Ok(TailError(tail.iter().sum()))
}

/// Keeps the `s` largest-magnitude entries. Ties are resolved in favour of
/// the smaller `(col, row)` pair.
pub fn truncate_top_s<M: MatrixEntries + ?Sized>(matrix: &M, s: usize) -> SparseMatrix {
    let (n, m) = matrix.dims();
    let mut entries = matrix.nonzeros();
    if s < entries.len() {
        entries.sort_by(|a, b| {
            b.2.abs()
                .total_cmp(&a.2.abs())
                .then((a.1, a.0).cmp(&(b.1, b.0)))
        });
        entries.truncate(s);
    }
    SparseMatrix::from_triplets(n, m, entries).expect("entries come from a valid matrix")
}

/// Keeps the `s` largest-magnitude entries of a dense vector, ties to the
/// smaller index.
pub fn top_s_of_vector(x: &[f64], s: usize) -> SparseVector {
    let mut idx: Vec<usize> = (0..x.len()).filter(|&i| x[i] != 0.0).collect();
    if s < idx.len() {
        idx.sort_by(|&a, &b| x[b].abs().total_cmp(&x[a].abs()).then(a.cmp(&b)));
        idx.truncate(s);
    }
    SparseVector::from_entries(x.len(), idx.into_iter().map(|i| (i, x[i])).collect())
        .expect("indices are in range and unique")
}

/// ℓ1 error of the best `s`-sparse approximation of `x`.
pub fn best_s_term_error(x: &[f64], s: usize) -> f64 {
    let mut mags: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    mags.iter().skip(s).sum()
}

/// Entrywise `a - b`.
pub fn matrix_sub(a: &SparseMatrix, b: &SparseMatrix) -> Result<SparseMatrix> {
    check_dim(a.n(), b.n())?;
    check_dim(a.m(), b.m())?;
    let mut columns = Vec::with_capacity(a.m());
    for c in 0..a.m() {
        columns.push(a.column(c).add(&b.column(c).scale(-1.0))?);
    }
    SparseMatrix::from_columns(a.n(), &columns)
}

/// `‖A_j - est_j‖₁` against the ground truth.
pub fn column_residual_l1(a: &SignalMatrix, est: &SparseMatrix, col: usize) -> Result<f64> {
    check_dim(a.n(), est.n())?;
    check_dim(a.m(), est.m())?;
    if col >= a.m() {
        return Err(Error::input(format!("column {col} out of range")));
    }
    Ok(vector_residual_l1(a.column(col), &est.column(col)))
}

/// `‖x - v‖₁` for dense `x` and sparse `v` of the same dimension.
pub(crate) fn vector_residual_l1(x: &[f64], v: &SparseVector) -> f64 {
    let mut diff = x.to_vec();
    for &(i, val) in v.entries() {
        diff[i] -= val;
    }
    diff.iter().map(|d| d.abs()).sum()
}

/// `‖A - est‖₁` summed over every column.
pub fn matrix_residual_l1(a: &SignalMatrix, est: &SparseMatrix) -> Result<f64> {
    check_dim(a.n(), est.n())?;
    check_dim(a.m(), est.m())?;
    Ok((0..a.m())
        .map(|c| vector_residual_l1(a.column(c), &est.column(c)))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l1_examples() {
        assert_eq!(l1_norm(&[0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(l1_norm(&[1.0, -2.0, 3.0]).unwrap(), 6.0);
        assert!(l1_norm(&[1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn agrees_examples() {
        let v = [5.0, 0.0, 3.0];
        assert!(agrees(&SparseVector::zeros(3), &v).unwrap());
        let u = SparseVector::from_entries(3, vec![(0, 5.0)]).unwrap();
        assert!(agrees(&u, &v).unwrap());
        let u = SparseVector::from_entries(3, vec![(1, 1.0)]).unwrap();
        assert!(!agrees(&u, &v).unwrap());
        let u = SparseVector::from_entries(3, vec![(2, 2.0)]).unwrap();
        assert!(!agrees(&u, &v).unwrap());
        assert!(agrees(&SparseVector::zeros(4), &v).is_err());
    }

    #[test]
    fn tail_error_examples() {
        let a = SignalMatrix::from_columns(&[vec![4.0, 3.0, 0.0, 0.0], vec![0.0, 0.0, 2.0, 1.0]])
            .unwrap();
        assert_eq!(optimal_tail_error(&a, 1).unwrap().value(), 3.0);
        assert_eq!(optimal_tail_error(&a, 2).unwrap().value(), 0.0);
        assert!(optimal_tail_error(&a, 0).is_err());
        assert!(optimal_tail_error(&a, 5).is_err());

        let c = SignalMatrix::from_col_major(3, 2, vec![0.5; 6]).unwrap();
        assert_eq!(optimal_tail_error(&c, 1).unwrap().value(), 4.0 * 0.5);
    }

    #[test]
    fn truncate_examples() {
        let a = SignalMatrix::from_columns(&[vec![5.0, -4.0], vec![3.0, 2.0]]).unwrap();
        assert_eq!(truncate_top_s(&a, 0).nnz(), 0);
        assert_eq!(truncate_top_s(&a, 7), SparseMatrix::from_dense(&a));
        let t = truncate_top_s(&a, 2);
        assert_eq!(t.entries(), &[(0, 0, 5.0), (1, 0, -4.0)]);
        assert_eq!(matrix_residual_l1(&a, &t).unwrap(), 5.0);
    }

    #[test]
    fn truncate_ties_prefer_small_col_then_row() {
        let a = SignalMatrix::from_columns(&[vec![0.0, 1.0], vec![-1.0, 1.0]]).unwrap();
        let t = truncate_top_s(&a, 2);
        assert_eq!(t.entries(), &[(1, 0, 1.0), (0, 1, -1.0)]);
    }

    #[test]
    fn sub_and_residual() {
        let a = SignalMatrix::from_columns(&[vec![1.0, 2.0], vec![0.0, -3.0]]).unwrap();
        let s = SparseMatrix::from_dense(&a);
        let z = SparseMatrix::zeros(2, 2);
        assert_eq!(matrix_sub(&s, &z).unwrap(), s);
        assert_eq!(matrix_sub(&s, &s).unwrap().nnz(), 0);
        for j in 0..2 {
            assert_eq!(column_residual_l1(&a, &s, j).unwrap(), 0.0);
        }
        assert!(matrix_sub(&s, &SparseMatrix::zeros(3, 2)).is_err());
        assert_eq!(column_residual_l1(&a, &z, 1).unwrap(), 3.0);
    }
}
