use super::halving_iterations;
use crate::error::{Error, Result};
use crate::matrix::{SparseMatrix, SparseVector};
use crate::measurement::ColumnHandle;
use crate::oracle::truncate_top_s;
use crate::primitives::{estimate_l1, probe_support, sparse_recover, RecoveryConfig, RecoveryMode};

/// Inner recovery accuracy.
pub const CONST_INNER_EPS: f64 = 2.0 / 3.0;

/// Columns still active in the halving loop and the ones already fixed.
#[derive(Debug, Clone)]
pub struct HalvingState {
    m: usize,
    ell: usize,
    active: Vec<usize>,
    fixed: Vec<Option<SparseVector>>,
}

impl HalvingState {
    pub fn new(m: usize) -> Self {
        Self {
            m,
            ell: 1,
            active: (0..m).collect(),
            fixed: vec![None; m],
        }
    }

    /// `⌈m / 2^{ℓ-1}⌉`, the active-set size at the start of iteration `ℓ`.
    pub fn expected_active(m: usize, ell: usize) -> usize {
        m.div_ceil(1 << (ell - 1))
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    /// Checks the active-set size and that active and fixed columns
    /// partition `[m]`.
    pub fn check(&self) -> Result<()> {
        let expected = Self::expected_active(self.m, self.ell);
        if self.active.len() != expected {
            return Err(Error::usage(format!(
                "iteration {}: {} active columns, expected {expected}",
                self.ell,
                self.active.len()
            )));
        }
        let fixed = self.fixed.iter().filter(|f| f.is_some()).count();
        let disjoint = self.active.iter().all(|&j| self.fixed[j].is_none());
        if !disjoint || fixed + self.active.len() != self.m {
            return Err(Error::usage(
                "active and fixed columns do not partition the columns",
            ));
        }
        Ok(())
    }

    /// How many columns iteration `ℓ` fixes: enough to leave `⌈m/2^ℓ⌉`
    /// active, or all of them in the last iteration.
    pub fn selection_size(&self) -> usize {
        if self.ell >= halving_iterations(self.m) {
            self.active.len()
        } else {
            self.active.len() - self.m.div_ceil(1 << self.ell)
        }
    }
}

/// What one halving iteration did.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub ell: usize,
    /// Active columns at the start of the iteration, ascending.
    pub active: Vec<usize>,
    /// Sparsity requested from the inner recovery (before clamping to `n`).
    pub sparsity: usize,
    /// Residual norm estimate per active column, aligned with `active`.
    pub rho: Vec<f64>,
    /// Columns fixed in this iteration.
    pub fixed: Vec<usize>,
    /// Measurements spent on recovery (including probes in sketch mode).
    pub recovery_charge: u64,
    pub norm_charge: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstOutcome {
    /// The `km`-sparse output.
    pub estimate: SparseMatrix,
    /// Fixed columns before the final truncation.
    pub assembled: SparseMatrix,
    /// Residual norm estimate of each column from the iteration that fixed it.
    pub rho: Vec<f64>,
    pub iterations: Vec<IterationTrace>,
}

/// Orders `active` by `(rho, column)` and returns the first `count`.
pub(crate) fn smallest_by_rho(active: &[usize], rho: &[f64], count: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..active.len()).collect();
    order.sort_by(|&a, &b| rho[a].total_cmp(&rho[b]).then(active[a].cmp(&active[b])));
    let mut chosen: Vec<usize> = order.into_iter().take(count).map(|p| active[p]).collect();
    chosen.sort_unstable();
    chosen
}

/// Constant-factor batch recovery with a `km`-sparse output.
///
/// Iteration `ℓ = 1..⌈log₂ 2m⌉` recovers every active column at sparsity
/// `2^{ℓ+1}k`, estimates the ℓ1 norm of each residual, and fixes the
/// columns with the smallest estimates. The assembled matrix is truncated
/// to its `km` heaviest entries.
pub fn batch_recover_const(
    handles: &[ColumnHandle<'_>],
    k: usize,
    cfg: &RecoveryConfig,
) -> Result<ConstOutcome> {
    cfg.validate()?;
    let first = handles.first().ok_or_else(|| Error::input("no columns"))?;
    let (n, m) = (first.dim(), handles.len());
    if k < 1 || k > n {
        return Err(Error::input(format!("k must lie in [1, {n}], got {k}")));
    }
    let ledger = first.ledger();
    let mut state = HalvingState::new(m);
    let mut rho_at_fix = vec![0.0; m];
    let mut iterations = Vec::new();

    for ell in 1..=halving_iterations(m) {
        state.ell = ell;
        state.check()?;
        let sparsity = (1usize << (ell + 1)) * k;
        let active = state.active.clone();

        let before = ledger.total();
        let (tmp, rho, recovery_charge) = match cfg.mode {
            RecoveryMode::Idealized => ledger.in_round(|| {
                let tmp = recover_active(handles, &active, sparsity, cfg)?;
                let recovery_charge = ledger.total() - before;
                let rho = residual_norms(handles, &active, &tmp, cfg)?;
                Ok((tmp, rho, recovery_charge))
            })?,
            RecoveryMode::Sketch => {
                let candidates =
                    ledger.in_round(|| recover_active(handles, &active, sparsity, cfg))?;
                ledger.in_round(|| {
                    let tmp: Vec<SparseVector> = active
                        .iter()
                        .zip(&candidates)
                        .map(|(&j, cand)| probe_support(&handles[j], cand))
                        .collect::<Result<_>>()?;
                    let recovery_charge = ledger.total() - before;
                    let rho = residual_norms(handles, &active, &tmp, cfg)?;
                    Ok((tmp, rho, recovery_charge))
                })?
            }
        };
        let norm_charge = ledger.total() - before - recovery_charge;

        let chosen = smallest_by_rho(&active, &rho, state.selection_size());
        for (pos, &j) in active.iter().enumerate() {
            if chosen.binary_search(&j).is_ok() {
                state.fixed[j] = Some(tmp[pos].clone());
                rho_at_fix[j] = rho[pos];
            }
        }
        state.active.retain(|j| chosen.binary_search(j).is_err());
        iterations.push(IterationTrace {
            ell,
            active,
            sparsity,
            rho,
            fixed: chosen,
            recovery_charge,
            norm_charge,
        });
    }
    if !state.active.is_empty() {
        return Err(Error::usage("halving loop ended with active columns"));
    }

    let columns: Vec<SparseVector> = state
        .fixed
        .into_iter()
        .map(|c| c.expect("every column fixed"))
        .collect();
    let assembled = SparseMatrix::from_columns(n, &columns)?;
    let estimate = truncate_top_s(&assembled, k * m);
    Ok(ConstOutcome {
        estimate,
        assembled,
        rho: rho_at_fix,
        iterations,
    })
}

fn recover_active(
    handles: &[ColumnHandle<'_>],
    active: &[usize],
    sparsity: usize,
    cfg: &RecoveryConfig,
) -> Result<Vec<SparseVector>> {
    active
        .iter()
        .map(|&j| sparse_recover(&handles[j], sparsity, CONST_INNER_EPS, cfg))
        .collect()
}

fn residual_norms(
    handles: &[ColumnHandle<'_>],
    active: &[usize],
    tmp: &[SparseVector],
    cfg: &RecoveryConfig,
) -> Result<Vec<f64>> {
    active
        .iter()
        .zip(tmp)
        .map(|(&j, x)| Ok(estimate_l1(&handles[j].shifted_sparse(x)?, cfg)?.value()))
        .collect()
}
