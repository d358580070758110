//! Batch sparse recovery from counted, adaptively chosen linear measurements.
//!
//! Signals are the columns of an `n × m` matrix. Algorithms see them only
//! through [`ColumnHandle`]s, which charge every linear query to a shared
//! [`Ledger`]. The [`oracle`] module holds exact reference computations
//! used for scoring.

pub mod batch;
pub mod error;
pub mod gen;
pub mod io;
pub mod lowerbound;
pub mod matrix;
pub mod measurement;
pub mod oracle;
pub mod primitives;
pub mod report;
pub mod rng;

pub use batch::{
    batch_recover_const, batch_recover_eps, expected_rounds, halving_iterations, Algorithm,
};
pub use error::{Error, Result};
pub use gen::{InstanceKind, InstanceSpec};
pub use matrix::{MatrixEntries, SignalMatrix, SparseMatrix, SparseVector};
pub use measurement::{ColumnHandle, Ledger, LedgerSnapshot, SensingMatrix};
pub use oracle::{agrees, optimal_tail_error, truncate_top_s, TailError};
pub use primitives::{RecoveryConfig, RecoveryMode};
pub use report::{AlgorithmChoice, Ratio, RunParams, RunReport};
