//! Single-column building blocks: stable sparse recovery, ℓ1 norm
//! estimation, and two schemes built from them (noise-capped doubling and
//! the two-round exactly-sparse scheme).

mod noise_capped;
mod norm;
mod recover;
mod two_round;

pub use noise_capped::{noise_capped_recover, NoiseCappedOutcome, NOISE_CAP_FACTOR};
pub use norm::{estimate_l1, norm_rows, NormEstimate};
pub use recover::{probe_support, recovery_charge, sketch_shape, sparse_recover};
pub use two_round::{two_round_exact_recover, TwoRoundOutcome};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// How [`sparse_recover`] obtains its answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecoveryMode {
    /// Reads the true top entries through a sealed capability and charges
    /// the closed-form measurement cost.
    Idealized,
    /// Count-sketch point queries with random signs and median estimates.
    Sketch,
}

impl FromStr for RecoveryMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "idealized" => Ok(RecoveryMode::Idealized),
            "sketch" => Ok(RecoveryMode::Sketch),
            other => Err(Error::Input(format!("unknown recovery mode `{other}`"))),
        }
    }
}

impl fmt::Display for RecoveryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RecoveryMode::Idealized => "idealized",
            RecoveryMode::Sketch => "sketch",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryConfig {
    pub mode: RecoveryMode,
    /// Multiplier on the idealized recovery cost.
    pub cost_constant: f64,
    /// Accuracy used where a scheme does not prescribe one.
    pub eps_default: f64,
    /// Cauchy rows per `log₂ n` in the norm estimator.
    pub norm_rows_constant: f64,
    pub seed: u64,
}

impl Default for RecoveryConfig {
    fn default() -> Self {
        Self {
            mode: RecoveryMode::Idealized,
            cost_constant: 1.0,
            eps_default: 0.5,
            norm_rows_constant: 16.0,
            seed: 0,
        }
    }
}

impl RecoveryConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn sketch(seed: u64) -> Self {
        Self {
            mode: RecoveryMode::Sketch,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cost_constant > 0.0 && self.cost_constant.is_finite()) {
            return Err(Error::input("cost constant must be positive"));
        }
        if !(self.norm_rows_constant > 0.0 && self.norm_rows_constant.is_finite()) {
            return Err(Error::input("norm rows constant must be positive"));
        }
        check_eps(self.eps_default)
    }
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::input(format!("eps must lie in (0, 1), got {eps}")))
    }
}

/// `log₂ n`, floored at 1 so a one-dimensional signal is still charged.
pub fn log2_dim(n: usize) -> f64 {
    (n as f64).log2().max(1.0)
}

/// `ε^{-1/2} · max(1, ln³(1/ε))`, the per-entry cost factor of stable
/// sparse recovery.
pub fn accuracy_factor(eps: f64) -> f64 {
    eps.powf(-0.5) * (1.0 / eps).ln().powi(3).max(1.0)
}
