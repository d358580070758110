use super::halving::{batch_recover_const, ConstOutcome};
use crate::error::Result;
use crate::matrix::{SparseMatrix, SparseVector};
use crate::measurement::ColumnHandle;
use crate::oracle::truncate_top_s;
use crate::primitives::{
    check_eps, estimate_l1, probe_support, sparse_recover, RecoveryConfig, RecoveryMode,
};

/// Numerator constant of the per-column refinement budget
/// `⌈100 m k / (ε |E_i|)⌉`.
pub const REFINE_BUDGET_CONSTANT: f64 = 100.0;

/// Columns grouped by residual norm estimate into dyadic buckets below the
/// maximum `M`: bucket `i` (1-based) holds `2^{-i} M < ρ_j ≤ 2^{-i+1} M`
/// for `i = 1..=⌈log₂(m/ε)⌉`. Columns below the last bucket are light.
#[derive(Debug, Clone, PartialEq)]
pub struct BucketState {
    pub max_norm: f64,
    /// `buckets[i - 1]` is bucket `i`, column indices ascending.
    pub buckets: Vec<Vec<usize>>,
    /// 1-based bucket of each column, `None` for light columns.
    pub bucket_of: Vec<Option<usize>>,
}

impl BucketState {
    /// `⌈log₂(m/ε)⌉`.
    pub fn bucket_count(m: usize, eps: f64) -> usize {
        (m as f64 / eps).log2().ceil().max(1.0) as usize
    }

    pub fn build(rho: &[f64], eps: f64) -> Self {
        let m = rho.len();
        let max_norm = rho.iter().cloned().fold(0.0, f64::max);
        let count = Self::bucket_count(m, eps);
        let mut buckets = vec![Vec::new(); count];
        let mut bucket_of = vec![None; m];
        if max_norm > 0.0 {
            for (j, &r) in rho.iter().enumerate() {
                let mut upper = max_norm;
                for i in 1..=count {
                    let lower = upper / 2.0;
                    if r > lower && r <= upper {
                        buckets[i - 1].push(j);
                        bucket_of[j] = Some(i);
                        break;
                    }
                    upper = lower;
                }
            }
        }
        Self {
            max_norm,
            buckets,
            bucket_of,
        }
    }

    /// Columns in some bucket.
    pub fn heavy(&self) -> Vec<usize> {
        (0..self.bucket_of.len())
            .filter(|&j| self.bucket_of[j].is_some())
            .collect()
    }

    /// Refinement sparsity `⌈100 m k / (ε |E_i|)⌉`, clamped to `n`.
    pub fn budget(&self, col: usize, n: usize, k: usize, eps: f64) -> Option<usize> {
        let i = self.bucket_of[col]?;
        let m = self.bucket_of.len() as f64;
        let size = self.buckets[i - 1].len() as f64;
        let s = (REFINE_BUDGET_CONSTANT * m * k as f64 / (eps * size)).ceil() as usize;
        Some(s.min(n))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsOutcome {
    /// The constant-factor initial estimate.
    pub init: ConstOutcome,
    /// Norm estimate of each residual `A_j - A_j^init`.
    pub residual_norms: Vec<f64>,
    pub buckets: BucketState,
    /// Refinement sparsity of each heavy column.
    pub sparsity: Vec<Option<usize>>,
    /// `A^init + A^tmp`; columns may exceed the `km` budget.
    pub estimate: SparseMatrix,
    /// `estimate` truncated to its `km` heaviest entries, for comparison.
    pub truncated: SparseMatrix,
    pub norm_charge: u64,
    pub refine_charge: u64,
}

/// `(1+ε)` batch recovery: refines the constant-factor estimate by
/// spending a per-bucket budget on the heavier residual columns.
pub fn batch_recover_eps(
    handles: &[ColumnHandle<'_>],
    k: usize,
    eps: f64,
    cfg: &RecoveryConfig,
) -> Result<EpsOutcome> {
    check_eps(eps)?;
    let init = batch_recover_const(handles, k, cfg)?;
    let ledger = handles[0].ledger();
    let (n, m) = (handles[0].dim(), handles.len());

    let shifted: Vec<ColumnHandle<'_>> = handles
        .iter()
        .enumerate()
        .map(|(j, h)| h.shifted_sparse(&init.estimate.column(j)))
        .collect::<Result<_>>()?;

    let before = ledger.total();
    let residual_norms: Vec<f64> = ledger.in_round(|| {
        shifted
            .iter()
            .map(|d| Ok(estimate_l1(d, cfg)?.value()))
            .collect()
    })?;
    let norm_charge = ledger.total() - before;

    let buckets = BucketState::build(&residual_norms, eps);
    let sparsity: Vec<Option<usize>> = (0..m).map(|j| buckets.budget(j, n, k, eps)).collect();
    let heavy = buckets.heavy();

    let before = ledger.total();
    let mut refinements: Vec<SparseVector> = vec![SparseVector::zeros(n); m];
    if !heavy.is_empty() {
        let recover = || -> Result<Vec<SparseVector>> {
            heavy
                .iter()
                .map(|&j| {
                    sparse_recover(
                        &shifted[j],
                        sparsity[j].expect("heavy has a budget"),
                        eps,
                        cfg,
                    )
                })
                .collect()
        };
        let tmp = match cfg.mode {
            RecoveryMode::Idealized => ledger.in_round(recover)?,
            RecoveryMode::Sketch => {
                let candidates = ledger.in_round(recover)?;
                ledger.in_round(|| {
                    heavy
                        .iter()
                        .zip(&candidates)
                        .map(|(&j, c)| probe_support(&shifted[j], c))
                        .collect()
                })?
            }
        };
        for (&j, t) in heavy.iter().zip(tmp) {
            refinements[j] = t;
        }
    }
    let refine_charge = ledger.total() - before;

    let columns: Vec<SparseVector> = (0..m)
        .map(|j| init.estimate.column(j).add(&refinements[j]))
        .collect::<Result<_>>()?;
    let estimate = SparseMatrix::from_columns(n, &columns)?;
    let truncated = truncate_top_s(&estimate, k * m);
    Ok(EpsOutcome {
        init,
        residual_norms,
        buckets,
        sparsity,
        estimate,
        truncated,
        norm_charge,
        refine_charge,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bucket_boundaries() {
        // m = 4, eps = 0.5: ⌈log₂ 8⌉ = 3 buckets covering (M/8, M].
        let rho = [8.0, 4.0, 4.5, 1.0];
        let b = BucketState::build(&rho, 0.5);
        assert_eq!(b.buckets, vec![vec![0, 2], vec![1], vec![]]);
        assert_eq!(b.bucket_of, vec![Some(1), Some(2), Some(1), None]);
        let b = BucketState::build(&[8.0, 1.0 + 1e-12, 0.0, 2.0], 0.5);
        assert_eq!(b.bucket_of, vec![Some(1), Some(3), None, Some(3)]);
    }

    #[test]
    fn zero_max_has_no_heavy_columns() {
        let b = BucketState::build(&[0.0; 5], 0.25);
        assert!(b.heavy().is_empty());
        assert_eq!(b.buckets.len(), BucketState::bucket_count(5, 0.25));
    }

    #[test]
    fn budget_uses_bucket_size() {
        let b = BucketState::build(&[1.0, 1.0, 0.6, 0.0], 0.5);
        // Bucket 1 holds three columns: ⌈100·4·2/(0.5·3)⌉ = 534, clamped.
        assert_eq!(b.budget(0, 1000, 2, 0.5), Some(534));
        assert_eq!(b.budget(0, 128, 2, 0.5), Some(128));
        assert_eq!(b.budget(3, 1000, 2, 0.5), None);
    }
}
