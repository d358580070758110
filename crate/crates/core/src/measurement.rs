//! Measurement oracle and cost model.
//!
//! Every linear query against a column of the hidden signal goes through a
//! [`ColumnHandle`] and is charged to a shared [`Ledger`]. Queries are only
//! accepted while a round is open; rounds are opened and closed explicitly by
//! the algorithm driving the recovery.

use crate::error::{check_dim, Error, Result};
use crate::matrix::{SignalMatrix, SparseVector};
use serde::{Deserialize, Serialize};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

/// One logged query, kept only when the ledger was built with
/// [`Ledger::with_query_log`].
#[derive(Debug, Clone, PartialEq)]
pub struct QueryRecord {
    pub column: usize,
    pub round: u64,
    pub query: Vec<f64>,
}

/// Per-column measurement counters plus the adaptive-round counter.
#[derive(Debug)]
pub struct Ledger {
    per_column: Vec<AtomicU64>,
    completed: AtomicU64,
    open: AtomicBool,
    current_charge: AtomicU64,
    round_charges: Mutex<Vec<u64>>,
    log: Option<Mutex<Vec<QueryRecord>>>,
}

/// Serializable view of a ledger.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerSnapshot {
    pub t_j: Vec<u64>,
    pub total: u64,
    pub rounds: u64,
}

impl Ledger {
    pub fn new(m: usize) -> Self {
        Self {
            per_column: (0..m).map(|_| AtomicU64::new(0)).collect(),
            completed: AtomicU64::new(0),
            open: AtomicBool::new(false),
            current_charge: AtomicU64::new(0),
            round_charges: Mutex::new(Vec::new()),
            log: None,
        }
    }

    /// A ledger that additionally records every query vector.
    pub fn with_query_log(m: usize) -> Self {
        Self {
            log: Some(Mutex::new(Vec::new())),
            ..Self::new(m)
        }
    }

    pub fn columns(&self) -> usize {
        self.per_column.len()
    }

    /// Opens a round and returns its zero-based id.
    pub fn begin_round(&self) -> Result<u64> {
        if self
            .open
            .compare_exchange(false, true, Ordering::AcqRel, Ordering::Acquire)
            .is_err()
        {
            return Err(Error::usage("begin_round called while a round is open"));
        }
        self.current_charge.store(0, Ordering::Release);
        Ok(self.completed.load(Ordering::Acquire))
    }

    pub fn end_round(&self) -> Result<()> {
        if self
            .open
            .compare_exchange(true, false, Ordering::AcqRel, Ordering::Acquire)
            .is_err()
        {
            return Err(Error::usage("end_round called with no open round"));
        }
        let charge = self.current_charge.swap(0, Ordering::AcqRel);
        self.round_charges.lock().unwrap().push(charge);
        self.completed.fetch_add(1, Ordering::AcqRel);
        Ok(())
    }

    /// Runs `f` inside a fresh round. The round is closed even when `f`
    /// fails.
    pub fn in_round<T>(&self, f: impl FnOnce() -> Result<T>) -> Result<T> {
        self.begin_round()?;
        let out = f();
        self.end_round()?;
        out
    }

    /// Id of the open round, if any.
    pub fn current_round(&self) -> Option<u64> {
        self.open
            .load(Ordering::Acquire)
            .then(|| self.completed.load(Ordering::Acquire))
    }

    /// Number of completed rounds.
    pub fn rounds(&self) -> u64 {
        self.completed.load(Ordering::Acquire)
    }

    pub fn per_column(&self) -> Vec<u64> {
        self.per_column
            .iter()
            .map(|c| c.load(Ordering::Acquire))
            .collect()
    }

    pub fn column_total(&self, col: usize) -> u64 {
        self.per_column[col].load(Ordering::Acquire)
    }

    pub fn total(&self) -> u64 {
        self.per_column
            .iter()
            .map(|c| c.load(Ordering::Acquire))
            .sum()
    }

    /// Measurements charged in each completed round, in order.
    pub fn round_charges(&self) -> Vec<u64> {
        self.round_charges.lock().unwrap().clone()
    }

    pub fn snapshot(&self) -> LedgerSnapshot {
        LedgerSnapshot {
            t_j: self.per_column(),
            total: self.total(),
            rounds: self.rounds(),
        }
    }

    /// Logged queries; empty unless built with [`Ledger::with_query_log`].
    pub fn queries(&self) -> Vec<QueryRecord> {
        self.log
            .as_ref()
            .map(|l| l.lock().unwrap().clone())
            .unwrap_or_default()
    }

    fn require_open(&self) -> Result<u64> {
        self.current_round()
            .ok_or_else(|| Error::usage("measurement issued outside an open round"))
    }

    fn charge(&self, col: usize, count: u64) {
        self.per_column[col].fetch_add(count, Ordering::AcqRel);
        self.current_charge.fetch_add(count, Ordering::AcqRel);
    }

    fn record(&self, col: usize, round: u64, query: impl FnOnce() -> Vec<f64>) {
        if let Some(log) = &self.log {
            log.lock().unwrap().push(QueryRecord {
                column: col,
                round,
                query: query(),
            });
        }
    }
}

/// Row-major `t x n` sensing matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingMatrix {
    rows: usize,
    n: usize,
    data: Vec<f64>,
}

impl SensingMatrix {
    pub fn new(rows: usize, n: usize, data: Vec<f64>) -> Result<Self> {
        check_dim(rows * n, data.len())?;
        Ok(Self { rows, n, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self { rows: n, n, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.n..(r + 1) * self.n]
    }
}

/// Privileged read used by the idealized recovery mode. Only
/// `primitives::recover` creates one.
pub(crate) struct IdealizedAccess(());

impl IdealizedAccess {
    pub(crate) fn grant() -> Self {
        IdealizedAccess(())
    }
}

/// Measure-only view of one column of the hidden signal, optionally shifted
/// by a known vector so that queries apply to `A_j - shift`.
#[derive(Clone)]
pub struct ColumnHandle<'a> {
    col: usize,
    signal: &'a SignalMatrix,
    ledger: &'a Ledger,
    shift: Option<Arc<Vec<f64>>>,
}

impl std::fmt::Debug for ColumnHandle<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ColumnHandle")
            .field("col", &self.col)
            .field("shifted", &self.shift.is_some())
            .finish()
    }
}

impl<'a> ColumnHandle<'a> {
    /// One handle per column, all charging `ledger`.
    pub fn all(signal: &'a SignalMatrix, ledger: &'a Ledger) -> Result<Vec<Self>> {
        check_dim(signal.m(), ledger.columns())?;
        Ok((0..signal.m())
            .map(|col| ColumnHandle {
                col,
                signal,
                ledger,
                shift: None,
            })
            .collect())
    }

    pub fn new(signal: &'a SignalMatrix, ledger: &'a Ledger, col: usize) -> Result<Self> {
        check_dim(signal.m(), ledger.columns())?;
        if col >= signal.m() {
            return Err(Error::input(format!("column {col} out of range")));
        }
        Ok(ColumnHandle {
            col,
            signal,
            ledger,
            shift: None,
        })
    }

    pub fn column(&self) -> usize {
        self.col
    }

    pub fn dim(&self) -> usize {
        self.signal.n()
    }

    pub fn ledger(&self) -> &'a Ledger {
        self.ledger
    }

    /// `x_i = A_ij - shift_i`.
    #[inline]
    fn entry(&self, i: usize) -> f64 {
        let a = self.signal.get(i, self.col);
        match &self.shift {
            Some(s) => a - s[i],
            None => a,
        }
    }

    /// Returns `aᵀ(A_j - shift)` and charges one measurement.
    pub fn measure(&self, a: &[f64]) -> Result<f64> {
        let round = self.ledger.require_open()?;
        check_dim(self.dim(), a.len())?;
        self.ledger.charge(self.col, 1);
        self.ledger.record(self.col, round, || a.to_vec());
        Ok(a.iter().enumerate().map(|(i, w)| w * self.entry(i)).sum())
    }

    /// Same as [`measure`](Self::measure) for a query given by its nonzero
    /// coefficients.
    pub fn measure_sparse(&self, a: &[(usize, f64)]) -> Result<f64> {
        let round = self.ledger.require_open()?;
        let n = self.dim();
        if let Some(&(i, _)) = a.iter().find(|(i, _)| *i >= n) {
            return Err(Error::input(format!(
                "query index {i} out of range for dimension {n}"
            )));
        }
        self.ledger.charge(self.col, 1);
        self.ledger.record(self.col, round, || {
            let mut q = vec![0.0; n];
            for &(i, w) in a {
                q[i] += w;
            }
            q
        });
        Ok(a.iter().map(|&(i, w)| w * self.entry(i)).sum())
    }

    /// One measurement per row of `s`.
    pub fn measure_batch(&self, s: &SensingMatrix) -> Result<Vec<f64>> {
        check_dim(self.dim(), s.n())?;
        if s.rows() == 0 {
            return Ok(Vec::new());
        }
        let round = self.ledger.require_open()?;
        let x: Vec<f64> = (0..self.dim()).map(|i| self.entry(i)).collect();
        self.ledger.charge(self.col, s.rows() as u64);
        let mut out = Vec::with_capacity(s.rows());
        for r in 0..s.rows() {
            let row = s.row(r);
            self.ledger.record(self.col, round, || row.to_vec());
            out.push(row.iter().zip(&x).map(|(w, v)| w * v).sum());
        }
        Ok(out)
    }

    /// Handle measuring `A_j - (shift + v)` on the same ledger.
    pub fn shifted(&self, v: &[f64]) -> Result<Self> {
        check_dim(self.dim(), v.len())?;
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::input("shift must be finite"));
        }
        let shift = match &self.shift {
            Some(s) => s.iter().zip(v).map(|(a, b)| a + b).collect(),
            None => v.to_vec(),
        };
        Ok(ColumnHandle {
            shift: Some(Arc::new(shift)),
            ..self.clone()
        })
    }

    pub fn shifted_sparse(&self, v: &SparseVector) -> Result<Self> {
        check_dim(self.dim(), v.dim())?;
        if v.is_empty() {
            return Ok(self.clone());
        }
        self.shifted(&v.to_dense())
    }

    /// Reads `A_j - shift` in full while charging `charge` measurements.
    pub(crate) fn idealized_read(
        &self,
        _access: &IdealizedAccess,
        charge: u64,
    ) -> Result<Vec<f64>> {
        self.ledger.require_open()?;
        self.ledger.charge(self.col, charge);
        Ok((0..self.dim()).map(|i| self.entry(i)).collect())
    }
}
