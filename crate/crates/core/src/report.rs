//! Running an algorithm end to end and scoring it against the ground truth.

use crate::batch::{batch_recover_const, batch_recover_eps};
use crate::error::{Error, Result};
use crate::matrix::{SignalMatrix, SparseMatrix, SparseVector};
use crate::measurement::{ColumnHandle, Ledger, LedgerSnapshot};
use crate::oracle::{matrix_residual_l1, optimal_tail_error};
use crate::primitives::{
    noise_capped_recover, two_round_exact_recover, RecoveryConfig, RecoveryMode,
};
use serde::{Serialize, Serializer};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

/// Errors at or below this are reported as exact.
pub const EXACT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlgorithmChoice {
    Const,
    Eps,
    NoiseCapped,
    TwoRound,
}

impl FromStr for AlgorithmChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "const" => Ok(Self::Const),
            "eps" => Ok(Self::Eps),
            "noisecapped" => Ok(Self::NoiseCapped),
            "tworound" => Ok(Self::TwoRound),
            other => Err(Error::input(format!("unknown algorithm `{other}`"))),
        }
    }
}

impl fmt::Display for AlgorithmChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Const => "const",
            Self::Eps => "eps",
            Self::NoiseCapped => "noisecapped",
            Self::TwoRound => "tworound",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ratio {
    Exact,
    Infinite,
    Value(f64),
}

impl Ratio {
    pub fn new(error: f64, eps_opt: f64) -> Self {
        if error <= EXACT_TOL {
            Ratio::Exact
        } else if eps_opt <= 0.0 {
            Ratio::Infinite
        } else {
            Ratio::Value(error / eps_opt)
        }
    }
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Ratio::Exact => s.serialize_str("exact"),
            Ratio::Infinite => s.serialize_str("inf"),
            Ratio::Value(v) => s.serialize_f64(*v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub algorithm: String,
    pub mode: RecoveryMode,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub eps: f64,
    pub eps_opt: f64,
    pub error: f64,
    pub ratio: Ratio,
    pub ledger: LedgerSnapshot,
    pub rounds: u64,
    pub wall_time_s: f64,
    pub seed: u64,
    /// Error of the `km`-truncated output of the refined scheme.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncated_error: Option<f64>,
    /// First-round support estimates of the two-round scheme.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column_sparsity: Option<Vec<usize>>,
}

impl RunReport {
    /// `error / eps_opt` as a number: 0 when exact against a zero optimum,
    /// infinite when inexact against one.
    pub fn ratio_value(&self) -> f64 {
        if self.eps_opt > 0.0 {
            self.error / self.eps_opt
        } else if self.error <= EXACT_TOL {
            0.0
        } else {
            f64::INFINITY
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report fields serialize")
    }
}

/// Parameters of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunParams {
    pub algorithm: AlgorithmChoice,
    pub k: usize,
    /// Refinement accuracy for `eps`, noise cap for `noisecapped`.
    pub eps: f64,
    pub config: RecoveryConfig,
}

/// Runs the selected algorithm through the measurement layer and scores
/// the output against `a`.
pub fn run(a: &SignalMatrix, params: &RunParams) -> Result<(SparseMatrix, RunReport)> {
    let eps_opt = optimal_tail_error(a, params.k)?.value();
    let ledger = Ledger::new(a.m());
    let handles = ColumnHandle::all(a, &ledger)?;
    let cfg = &params.config;
    let start = Instant::now();
    let mut truncated_error = None;
    let mut column_sparsity = None;
    let estimate = match params.algorithm {
        AlgorithmChoice::Const => batch_recover_const(&handles, params.k, cfg)?.estimate,
        AlgorithmChoice::Eps => {
            let out = batch_recover_eps(&handles, params.k, params.eps, cfg)?;
            truncated_error = Some(matrix_residual_l1(a, &out.truncated)?);
            out.estimate
        }
        AlgorithmChoice::NoiseCapped => {
            let columns: Vec<SparseVector> = handles
                .iter()
                .map(|h| Ok(noise_capped_recover(h, params.eps, cfg)?.estimate))
                .collect::<Result<_>>()?;
            SparseMatrix::from_columns(a.n(), &columns)?
        }
        AlgorithmChoice::TwoRound => {
            let out = two_round_exact_recover(&handles, cfg)?;
            column_sparsity = Some(out.sparsity_estimates);
            out.estimate
        }
    };
    let wall_time_s = start.elapsed().as_secs_f64();
    let error = matrix_residual_l1(a, &estimate)?;
    let report = RunReport {
        algorithm: params.algorithm.to_string(),
        mode: cfg.mode,
        n: a.n(),
        m: a.m(),
        k: params.k,
        eps: params.eps,
        eps_opt,
        error,
        ratio: Ratio::new(error, eps_opt),
        ledger: ledger.snapshot(),
        rounds: ledger.rounds(),
        wall_time_s,
        seed: cfg.seed,
        truncated_error,
        column_sparsity,
    };
    Ok((estimate, report))
}
