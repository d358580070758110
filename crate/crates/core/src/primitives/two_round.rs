use super::{log2_dim, norm_rows, sparse_recover, RecoveryConfig, RecoveryMode};
use crate::error::{Error, Result};
use crate::matrix::{SparseMatrix, SparseVector};
use crate::measurement::{ColumnHandle, IdealizedAccess};
use crate::rng::{self, purpose};
use rand::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct TwoRoundOutcome {
    pub estimate: SparseMatrix,
    /// Support size estimate per column from the first round.
    pub sparsity_estimates: Vec<usize>,
}

/// Two-round scheme for exactly sparse signals: estimate every `‖A_j‖₀` in
/// one round, then recover each column at twice its estimate in a second.
///
/// Zero estimates skip the second round for that column. Drives its own
/// rounds; no round may be open on entry.
pub fn two_round_exact_recover(
    handles: &[ColumnHandle<'_>],
    cfg: &RecoveryConfig,
) -> Result<TwoRoundOutcome> {
    cfg.validate()?;
    let first = handles.first().ok_or_else(|| Error::input("no columns"))?;
    let ledger = first.ledger();
    let n = first.dim();

    let estimates: Vec<usize> =
        ledger.in_round(|| handles.iter().map(|h| support_size(h, cfg)).collect())?;

    let recovered: Vec<SparseVector> = ledger.in_round(|| {
        handles
            .iter()
            .zip(&estimates)
            .map(|(h, &est)| {
                if est == 0 {
                    Ok(SparseVector::zeros(n))
                } else {
                    sparse_recover(h, 2 * est, cfg.eps_default, cfg)
                }
            })
            .collect()
    })?;

    Ok(TwoRoundOutcome {
        estimate: SparseMatrix::from_columns(n, &recovered)?,
        sparsity_estimates: estimates,
    })
}

/// Constant-factor estimate of the support size.
///
/// Idealized mode charges `⌈c_norm · log₂ n⌉` and returns the true count.
/// Sketch mode is a heuristic: at each subsampling level `ℓ` it measures
/// Gaussian combinations of coordinates kept with probability `2^{-ℓ}`,
/// and inverts the fraction of nonzero answers at the most informative
/// level.
fn support_size(h: &ColumnHandle<'_>, cfg: &RecoveryConfig) -> Result<usize> {
    let n = h.dim();
    match cfg.mode {
        RecoveryMode::Idealized => {
            let charge = norm_rows(n, cfg.norm_rows_constant) as u64;
            let x = h.idealized_read(&IdealizedAccess::grant(), charge)?;
            Ok(x.iter().filter(|v| **v != 0.0).count())
        }
        RecoveryMode::Sketch => {
            let round = h
                .ledger()
                .current_round()
                .ok_or_else(|| Error::usage("support estimation outside an open round"))?;
            let mut rng = rng::stream(cfg.seed, &[h.column() as u64, round, purpose::SUPPORT_SIZE]);
            let levels = log2_dim(n).floor() as usize + 1;
            let reps = cfg.norm_rows_constant.ceil() as usize;
            let mut fractions = Vec::with_capacity(levels);
            for level in 0..levels {
                let keep = 0.5f64.powi(level as i32);
                let mut nonzero = 0;
                for _ in 0..reps {
                    let mut query = Vec::new();
                    for i in 0..n {
                        if rng.random::<f64>() < keep {
                            query.push((i, rng::gaussian(&mut rng)));
                        }
                    }
                    if h.measure_sparse(&query)? != 0.0 {
                        nonzero += 1;
                    }
                }
                fractions.push(nonzero as f64 / reps as f64);
            }
            Ok(invert_fractions(&fractions, n))
        }
    }
}

fn invert_fractions(fractions: &[f64], n: usize) -> usize {
    if fractions[0] == 0.0 {
        return 0;
    }
    let informative = fractions
        .iter()
        .enumerate()
        .filter(|(l, p)| *l > 0 && **p > 0.0 && **p < 1.0)
        .min_by(|a, b| (a.1 - 0.5).abs().total_cmp(&(b.1 - 0.5).abs()));
    let est = match informative {
        Some((level, &p)) => (1.0 - p).ln() / (1.0 - 0.5f64.powi(level as i32)).ln(),
        None => {
            // Every level saturated or empty: the deepest saturated level
            // bounds the support from below.
            let deepest = fractions.iter().rposition(|p| *p == 1.0).unwrap_or(0);
            2f64.powi(deepest as i32)
        }
    };
    (est.round() as usize).clamp(1, n)
}
