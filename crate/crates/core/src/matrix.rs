//! Dense ground-truth matrices and sparse estimates.
//!
//! Indices are zero-based throughout the library; the text file format in
//! [`crate::io`] is the only place where one-based indices appear.

use crate::error::{check_dim, Error, Result};

/// Dense `n x m` real matrix stored column-major. This is the hidden signal
/// the recovery algorithms try to reconstruct.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalMatrix {
    n: usize,
    m: usize,
    data: Vec<f64>,
}

impl SignalMatrix {
    pub fn zeros(n: usize, m: usize) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::input(format!(
                "matrix dimensions must be positive, got {n}x{m}"
            )));
        }
        Ok(Self {
            n,
            m,
            data: vec![0.0; n * m],
        })
    }

    /// Builds a matrix from column-major data.
    pub fn from_col_major(n: usize, m: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::input(format!(
                "matrix dimensions must be positive, got {n}x{m}"
            )));
        }
        check_dim(n * m, data.len())?;
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::input(format!(
                "non-finite entry at row {}, column {}",
                pos % n,
                pos / n
            )));
        }
        Ok(Self { n, m, data })
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let m = columns.len();
        let n = columns.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n * m);
        for col in columns {
            check_dim(n, col.len())?;
            data.extend_from_slice(col);
        }
        Self::from_col_major(n, m, data)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[col * self.n + row]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::input("non-finite entry"));
        }
        self.data[col * self.n + row] = value;
        Ok(())
    }

    pub fn column(&self, col: usize) -> &[f64] {
        &self.data[col * self.n..(col + 1) * self.n]
    }

    pub fn as_col_major(&self) -> &[f64] {
        &self.data
    }

    /// Number of nonzero entries.
    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|v| **v != 0.0).count()
    }
}

/// Sparse vector of dimension `n` with entries sorted by index.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    n: usize,
    entries: Vec<(usize, f64)>,
}

impl SparseVector {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: Vec::new(),
        }
    }

    /// Validates and sorts `entries`. Zero values are dropped.
    pub fn from_entries(n: usize, mut entries: Vec<(usize, f64)>) -> Result<Self> {
        entries.retain(|&(_, v)| v != 0.0);
        entries.sort_by_key(|&(i, _)| i);
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::input(format!("duplicate index {}", w[0].0)));
            }
        }
        for &(i, v) in &entries {
            if i >= n {
                return Err(Error::input(format!(
                    "index {i} out of range for dimension {n}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::input(format!("non-finite value at index {i}")));
            }
        }
        Ok(Self { n, entries })
    }

    pub fn from_dense(x: &[f64]) -> Self {
        let entries = x
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| (i, *v))
            .collect();
        Self {
            n: x.len(),
            entries,
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for &(i, v) in &self.entries {
            out[i] = v;
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn get(&self, index: usize) -> f64 {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .map_or(0.0, |pos| self.entries[pos].1)
    }

    pub fn l1(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v.abs()).sum()
    }

    /// Entrywise sum; exact cancellations are dropped from the support.
    pub fn add(&self, other: &SparseVector) -> Result<SparseVector> {
        check_dim(self.n, other.n)?;
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (
            self.entries.iter().peekable(),
            other.entries.iter().peekable(),
        );
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&(i, x)), Some(&&(j, y))) => {
                    if i == j {
                        out.push((i, x + y));
                        a.next();
                        b.next();
                    } else if i < j {
                        out.push((i, x));
                        a.next();
                    } else {
                        out.push((j, y));
                        b.next();
                    }
                }
                (Some(&&e), None) => {
                    out.push(e);
                    a.next();
                }
                (None, Some(&&e)) => {
                    out.push(e);
                    b.next();
                }
                (None, None) => break,
            }
        }
        out.retain(|&(_, v)| v != 0.0);
        Ok(SparseVector {
            n: self.n,
            entries: out,
        })
    }

    pub fn scale(&self, factor: f64) -> SparseVector {
        let mut out = self.clone();
        for e in &mut out.entries {
            e.1 *= factor;
        }
        out.entries.retain(|&(_, v)| v != 0.0);
        out
    }
}

/// Sparse `n x m` matrix as `(row, col, value)` triplets, sorted by
/// `(col, row)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    m: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SparseMatrix {
    pub fn zeros(n: usize, m: usize) -> Self {
        Self {
            n,
            m,
            entries: Vec::new(),
        }
    }

    /// Validates triplets; zero values are dropped, duplicates rejected.
    pub fn from_triplets(
        n: usize,
        m: usize,
        mut entries: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        entries.retain(|&(_, _, v)| v != 0.0);
        entries.sort_by_key(|&(r, c, _)| (c, r));
        for w in entries.windows(2) {
            if (w[0].0, w[0].1) == (w[1].0, w[1].1) {
                return Err(Error::input(format!(
                    "duplicate entry ({}, {})",
                    w[0].0, w[0].1
                )));
            }
        }
        for &(r, c, v) in &entries {
            if r >= n || c >= m {
                return Err(Error::input(format!(
                    "entry ({r}, {c}) out of range for {n}x{m}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::input(format!("non-finite value at ({r}, {c})")));
            }
        }
        Ok(Self { n, m, entries })
    }

    /// Stacks one sparse vector per column.
    pub fn from_columns(n: usize, columns: &[SparseVector]) -> Result<Self> {
        let mut entries = Vec::new();
        for (c, col) in columns.iter().enumerate() {
            check_dim(n, col.dim())?;
            entries.extend(col.entries().iter().map(|&(r, v)| (r, c, v)));
        }
        Ok(Self {
            n,
            m: columns.len(),
            entries,
        })
    }

    pub fn from_dense(a: &SignalMatrix) -> Self {
        let mut entries = Vec::new();
        for c in 0..a.m() {
            for (r, &v) in a.column(c).iter().enumerate() {
                if v != 0.0 {
                    entries.push((r, c, v));
                }
            }
        }
        Self {
            n: a.n(),
            m: a.m(),
            entries,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn column(&self, col: usize) -> SparseVector {
        let start = self.entries.partition_point(|&(_, c, _)| c < col);
        let end = self.entries.partition_point(|&(_, c, _)| c <= col);
        SparseVector {
            n: self.n,
            entries: self.entries[start..end]
                .iter()
                .map(|&(r, _, v)| (r, v))
                .collect(),
        }
    }

    pub fn columns(&self) -> Vec<SparseVector> {
        (0..self.m).map(|c| self.column(c)).collect()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries
            .binary_search_by_key(&(col, row), |&(r, c, _)| (c, r))
            .map_or(0.0, |pos| self.entries[pos].2)
    }

    pub fn l1(&self) -> f64 {
        self.entries.iter().map(|e| e.2.abs()).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut cols = vec![vec![0.0; self.n]; self.m];
        for &(r, c, v) in &self.entries {
            cols[c][r] = v;
        }
        cols
    }
}

/// Read-only view of the nonzero entries of a matrix, used by the oracles
/// that accept either representation.
pub trait MatrixEntries {
    fn dims(&self) -> (usize, usize);
    /// Nonzero entries as `(row, col, value)`.
    fn nonzeros(&self) -> Vec<(usize, usize, f64)>;
}

impl MatrixEntries for SignalMatrix {
    fn dims(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    fn nonzeros(&self) -> Vec<(usize, usize, f64)> {
        SparseMatrix::from_dense(self).entries
    }
}

impl MatrixEntries for SparseMatrix {
    fn dims(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    fn nonzeros(&self) -> Vec<(usize, usize, f64)> {
        self.entries.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_matrices() {
        assert!(SignalMatrix::zeros(0, 3).is_err());
        assert!(SignalMatrix::from_col_major(2, 1, vec![1.0, f64::NAN]).is_err());
        assert!(SignalMatrix::from_col_major(2, 2, vec![1.0; 3]).is_err());
    }

    #[test]
    fn sparse_matrix_validation() {
        assert!(SparseMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (0, 0, 2.0)]).is_err());
        assert!(SparseMatrix::from_triplets(2, 2, vec![(2, 0, 1.0)]).is_err());
        let s = SparseMatrix::from_triplets(3, 2, vec![(2, 1, 1.0), (0, 1, 0.0), (1, 0, -2.0)])
            .unwrap();
        assert_eq!(s.nnz(), 2);
        assert_eq!(s.entries()[0], (1, 0, -2.0));
        assert_eq!(s.get(2, 1), 1.0);
        assert_eq!(s.column(1).entries(), &[(2, 1.0)]);
        assert!(s.column(0).entries() == [(1, -2.0)]);
    }

    #[test]
    fn sparse_vector_add_cancels() {
        let u = SparseVector::from_entries(4, vec![(0, 1.0), (2, 3.0)]).unwrap();
        let w = SparseVector::from_entries(4, vec![(2, -3.0), (3, 1.0)]).unwrap();
        let s = u.add(&w).unwrap();
        assert_eq!(s.entries(), &[(0, 1.0), (3, 1.0)]);
        assert!(u.add(&SparseVector::zeros(5)).is_err());
    }
}
