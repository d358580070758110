use super::{estimate_l1, sparse_recover, RecoveryConfig};
use crate::error::{Error, Result};
use crate::matrix::SparseVector;
use crate::measurement::ColumnHandle;

/// Target guarantee `‖x - x'‖₁ ≤ NOISE_CAP_FACTOR · eps_cap`: factor 2 from
/// the norm estimator times factor 3 from recovery at accuracy ½.
pub const NOISE_CAP_FACTOR: f64 = 6.0;

const INNER_EPS: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseCappedOutcome {
    pub estimate: SparseVector,
    /// Sparsity used in the final doubling step.
    pub sparsity: usize,
    /// Number of doubling steps, one adaptive round each.
    pub doublings: usize,
    /// Norm estimate of the final residual.
    pub residual_estimate: f64,
}

/// Recovery driven by a target error instead of a sparsity bound.
///
/// Tries `s = 1, 2, 4, …` in successive rounds and stops as soon as the
/// estimated residual is at most `2 · eps_cap`, or once `s` reaches the
/// dimension. Opens and closes its own rounds, so no round may be open on
/// entry.
pub fn noise_capped_recover(
    h: &ColumnHandle<'_>,
    eps_cap: f64,
    cfg: &RecoveryConfig,
) -> Result<NoiseCappedOutcome> {
    if !(eps_cap > 0.0 && eps_cap.is_finite()) {
        return Err(Error::input(format!(
            "noise cap must be positive, got {eps_cap}"
        )));
    }
    let n = h.dim();
    let ledger = h.ledger();
    let mut s = 1;
    let mut doublings = 0;
    loop {
        let (x, rho) = ledger.in_round(|| {
            let x = sparse_recover(h, s, INNER_EPS, cfg)?;
            let rho = estimate_l1(&h.shifted_sparse(&x)?, cfg)?.value();
            Ok((x, rho))
        })?;
        doublings += 1;
        if rho <= 2.0 * eps_cap || s >= n {
            return Ok(NoiseCappedOutcome {
                estimate: x,
                sparsity: s,
                doublings,
                residual_estimate: rho,
            });
        }
        s = (2 * s).min(n);
    }
}
