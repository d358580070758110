use super::{log2_dim, RecoveryConfig};
use crate::error::{Error, Result};
use crate::measurement::{ColumnHandle, SensingMatrix};
use crate::rng::{self, purpose};
use serde::Serialize;

/// Constant-factor estimate of an ℓ1 norm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct NormEstimate(pub f64);

impl NormEstimate {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Number of Cauchy rows, `⌈c_norm · log₂ n⌉`.
pub fn norm_rows(n: usize, norm_rows_constant: f64) -> usize {
    (norm_rows_constant * log2_dim(n)).ceil() as usize
}

pub(crate) fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

/// Estimates `‖x‖₁` for the vector behind `h` as the median of
/// `|⟨c_r, x⟩|` over i.i.d. standard Cauchy rows `c_r`.
///
/// Each projection is Cauchy with scale `‖x‖₁` and the median of a
/// standard `|Cauchy|` is 1, so no rescaling is applied. The sketch is
/// keyed by `(seed, column, round)`.
pub fn estimate_l1(h: &ColumnHandle<'_>, cfg: &RecoveryConfig) -> Result<NormEstimate> {
    let round = h
        .ledger()
        .current_round()
        .ok_or_else(|| Error::usage("norm estimation outside an open round"))?;
    let n = h.dim();
    let rows = norm_rows(n, cfg.norm_rows_constant);
    let mut rng = rng::stream(
        cfg.seed,
        &[h.column() as u64, round, purpose::NORM_ESTIMATE],
    );
    let data = (0..rows * n).map(|_| rng::cauchy(&mut rng)).collect();
    let sketch = SensingMatrix::new(rows, n, data)?;
    let mut y: Vec<f64> = h
        .measure_batch(&sketch)?
        .into_iter()
        .map(f64::abs)
        .collect();
    Ok(NormEstimate(median(&mut y)))
}
