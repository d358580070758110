//! Non-adaptive lower-bound experiment.
//!
//! A hidden column of i.i.d. Gaussians sits among copies of `e_1`. Any
//! non-adaptive scheme must fix its sensing matrices before seeing the
//! data, and with fewer than `n` rows on the Gaussian column the recovered
//! vector is wrong with probability one, whatever the recovery rule. The
//! harness instantiates the minimum-ℓ2-norm rule and compares against the
//! adaptive two-round scheme.

use crate::error::{Error, Result};
use crate::matrix::SignalMatrix;
use crate::measurement::{ColumnHandle, Ledger, SensingMatrix};
use crate::primitives::{two_round_exact_recover, RecoveryConfig};
use crate::rng::{self, purpose};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use std::fmt::Write as _;

/// Default relative tolerance for declaring a column recovered.
pub const EXACTNESS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct AdversarialInstance {
    pub a: SignalMatrix,
    pub hidden: usize,
    pub seed: u64,
}

/// Columns equal `e_1` except a uniformly chosen one holding i.i.d.
/// standard normals.
pub fn gen_adversarial(n: usize, m: usize, seed: u64) -> Result<AdversarialInstance> {
    let mut rng = rng::stream(seed, &[purpose::INSTANCE]);
    let mut a = SignalMatrix::zeros(n, m)?;
    let hidden = rng.random_range(0..m);
    for j in 0..m {
        if j == hidden {
            for i in 0..n {
                a.set(i, j, rng::gaussian(&mut rng))?;
            }
        } else {
            a.set(0, j, 1.0)?;
        }
    }
    Ok(AdversarialInstance { a, hidden, seed })
}

/// Per-column sensing matrices fixed before any measurement, with
/// minimum-ℓ2-norm reconstruction.
#[derive(Debug, Clone)]
pub struct NonAdaptiveScheme {
    n: usize,
    sensing: Vec<SensingMatrix>,
    pinv: Vec<DMatrix<f64>>,
}

impl NonAdaptiveScheme {
    /// `t_j = n` uses the identity. `0 < t_j < n` uses `e_1` followed by
    /// `t_j - 1` Gaussian rows, so `e_1` columns stay recoverable.
    pub fn with_budgets(n: usize, budgets: &[usize], seed: u64) -> Result<Self> {
        let mut sensing = Vec::with_capacity(budgets.len());
        for (j, &t) in budgets.iter().enumerate() {
            if t > n {
                return Err(Error::input(format!(
                    "budget {t} for column {j} exceeds n = {n}"
                )));
            }
            let s = if t == n {
                SensingMatrix::identity(n)
            } else {
                let mut rng = rng::stream(seed, &[purpose::SCHEME, j as u64]);
                let mut data = vec![0.0; t * n];
                if t > 0 {
                    data[0] = 1.0;
                }
                for v in data.iter_mut().skip(n) {
                    *v = rng::gaussian(&mut rng);
                }
                SensingMatrix::new(t, n, data)?
            };
            sensing.push(s);
        }
        Self::from_matrices(n, sensing)
    }

    pub fn from_matrices(n: usize, sensing: Vec<SensingMatrix>) -> Result<Self> {
        if let Some(s) = sensing.iter().find(|s| s.n() != n) {
            return Err(Error::Dimension {
                expected: n,
                actual: s.n(),
            });
        }
        let pinv = sensing
            .iter()
            .map(|s| {
                if s.rows() == 0 {
                    return DMatrix::zeros(n, 0);
                }
                let mat = DMatrix::from_fn(s.rows(), n, |r, c| s.row(r)[c]);
                mat.pseudo_inverse(1e-12)
                    .expect("pseudo-inverse threshold is nonnegative")
            })
            .collect();
        Ok(Self { n, sensing, pinv })
    }

    pub fn budgets(&self) -> Vec<usize> {
        self.sensing.iter().map(SensingMatrix::rows).collect()
    }

    pub fn sensing(&self, col: usize) -> &SensingMatrix {
        &self.sensing[col]
    }

    /// Minimum-norm solution of `S_j x = y`.
    pub fn reconstruct(&self, col: usize, y: &[f64]) -> Vec<f64> {
        if self.sensing[col].rows() == 0 {
            return vec![0.0; self.n];
        }
        (&self.pinv[col] * DVector::from_column_slice(y))
            .as_slice()
            .to_vec()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub success: Vec<bool>,
    pub errors: Vec<f64>,
    pub t_j: Vec<u64>,
}

impl TrialOutcome {
    pub fn all_recovered(&self) -> bool {
        self.success.iter().all(|s| *s)
    }
}

fn recovered(truth: &[f64], est: &[f64], tol: f64) -> (bool, f64) {
    let err: f64 = truth.iter().zip(est).map(|(a, b)| (a - b).abs()).sum();
    let scale: f64 = truth.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
    (err <= tol * scale, err)
}

/// Measures every column with its fixed sensing matrix in a single round
/// and reconstructs.
pub fn run_nonadaptive_trial(
    scheme: &NonAdaptiveScheme,
    inst: &AdversarialInstance,
    tol: f64,
) -> Result<TrialOutcome> {
    let a = &inst.a;
    if scheme.sensing.len() != a.m() {
        return Err(Error::Dimension {
            expected: a.m(),
            actual: scheme.sensing.len(),
        });
    }
    let ledger = Ledger::new(a.m());
    let handles = ColumnHandle::all(a, &ledger)?;
    let measurements: Vec<Vec<f64>> = ledger.in_round(|| {
        handles
            .iter()
            .map(|h| h.measure_batch(&scheme.sensing[h.column()]))
            .collect()
    })?;
    let mut success = Vec::with_capacity(a.m());
    let mut errors = Vec::with_capacity(a.m());
    for (j, y) in measurements.iter().enumerate() {
        let (ok, err) = recovered(a.column(j), &scheme.reconstruct(j, y), tol);
        success.push(ok);
        errors.push(err);
    }
    Ok(TrialOutcome {
        success,
        errors,
        t_j: ledger.per_column(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetProfile {
    pub name: String,
    pub budgets: Vec<usize>,
}

/// `full` (every `t_j = n`), `deficient` (every `t_j = n - 1`) and `half`
/// (the first `⌊m/2⌋` columns at `n`, the rest at `n - 1`).
pub fn standard_profiles(n: usize, m: usize) -> Vec<BudgetProfile> {
    let short = n.saturating_sub(1);
    vec![
        BudgetProfile {
            name: "full".into(),
            budgets: vec![n; m],
        },
        BudgetProfile {
            name: "deficient".into(),
            budgets: vec![short; m],
        },
        BudgetProfile {
            name: "half".into(),
            budgets: (0..m).map(|j| if j < m / 2 { n } else { short }).collect(),
        },
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub budget_profile: String,
    pub trials: usize,
    pub success_rate: f64,
    pub mean_total_measurements: f64,
}

/// Label of the adaptive baseline row.
pub const ADAPTIVE_PROFILE: &str = "adaptive-tworound";

fn instance_seed(seed: u64, trial: usize) -> u64 {
    rng::derive_seed(seed, &[purpose::INSTANCE, trial as u64])
}

/// Success rate of each budget profile over `trials` adversarial
/// instances, followed by the adaptive two-round baseline on the same
/// instances.
pub fn lowerbound_experiment(
    n: usize,
    m: usize,
    profiles: &[BudgetProfile],
    trials: usize,
    seed: u64,
) -> Result<Vec<ExperimentRow>> {
    if trials == 0 {
        return Err(Error::input("trials must be at least 1"));
    }
    let mut rows = Vec::with_capacity(profiles.len() + 1);
    for (p, profile) in profiles.iter().enumerate() {
        let scheme = NonAdaptiveScheme::with_budgets(
            n,
            &profile.budgets,
            rng::derive_seed(seed, &[purpose::SCHEME, p as u64]),
        )?;
        let mut successes = 0;
        let mut total = 0u64;
        for trial in 0..trials {
            let inst = gen_adversarial(n, m, instance_seed(seed, trial))?;
            let out = run_nonadaptive_trial(&scheme, &inst, EXACTNESS_TOL)?;
            successes += usize::from(out.all_recovered());
            total += out.t_j.iter().sum::<u64>();
        }
        rows.push(ExperimentRow {
            budget_profile: profile.name.clone(),
            trials,
            success_rate: successes as f64 / trials as f64,
            mean_total_measurements: total as f64 / trials as f64,
        });
    }

    let mut successes = 0;
    let mut total = 0u64;
    for trial in 0..trials {
        let inst = gen_adversarial(n, m, instance_seed(seed, trial))?;
        let (ok, measurements) = adaptive_trial(&inst, &RecoveryConfig::with_seed(seed))?;
        successes += usize::from(ok);
        total += measurements;
    }
    rows.push(ExperimentRow {
        budget_profile: ADAPTIVE_PROFILE.into(),
        trials,
        success_rate: successes as f64 / trials as f64,
        mean_total_measurements: total as f64 / trials as f64,
    });
    Ok(rows)
}

/// Runs the two-round scheme on one instance; returns whether every column
/// was recovered within [`EXACTNESS_TOL`] and the measurements spent.
pub fn adaptive_trial(inst: &AdversarialInstance, cfg: &RecoveryConfig) -> Result<(bool, u64)> {
    let a = &inst.a;
    let ledger = Ledger::new(a.m());
    let handles = ColumnHandle::all(a, &ledger)?;
    let out = two_round_exact_recover(&handles, cfg)?;
    let ok = (0..a.m()).all(|j| {
        recovered(
            a.column(j),
            &out.estimate.column(j).to_dense(),
            EXACTNESS_TOL,
        )
        .0
    });
    Ok((ok, ledger.total()))
}

pub fn experiment_csv(rows: &[ExperimentRow]) -> String {
    let mut out = String::from("budget_profile,trials,success_rate,mean_total_measurements\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.budget_profile, r.trials, r.success_rate, r.mean_total_measurements
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_structure() {
        let inst = gen_adversarial(16, 5, 3).unwrap();
        for j in 0..5 {
            let col = inst.a.column(j);
            if j == inst.hidden {
                assert!(col.iter().all(|v| *v != 0.0));
            } else {
                assert_eq!(col[0], 1.0);
                assert!(col[1..].iter().all(|v| *v == 0.0));
            }
        }
        assert_eq!(gen_adversarial(16, 5, 3).unwrap(), inst);
        let single = gen_adversarial(8, 1, 0).unwrap();
        assert_eq!(single.hidden, 0);
    }

    #[test]
    fn identity_recovers_hidden_column() {
        let inst = gen_adversarial(12, 3, 1).unwrap();
        let scheme = NonAdaptiveScheme::with_budgets(12, &[12; 3], 0).unwrap();
        let out = run_nonadaptive_trial(&scheme, &inst, EXACTNESS_TOL).unwrap();
        assert!(out.all_recovered());
        assert_eq!(out.t_j, vec![12; 3]);
    }

    #[test]
    fn deficient_budget_misses_hidden_column() {
        for seed in 0..20 {
            let inst = gen_adversarial(16, 4, seed).unwrap();
            let scheme = NonAdaptiveScheme::with_budgets(16, &[15; 4], 99).unwrap();
            let out = run_nonadaptive_trial(&scheme, &inst, EXACTNESS_TOL).unwrap();
            assert!(!out.success[inst.hidden]);
            assert!(out.errors[inst.hidden] >= 1e-3);
            // e_1 is in every row space, so basis columns are recovered.
            for j in (0..4).filter(|&j| j != inst.hidden) {
                assert!(out.success[j], "basis column {j} missed");
            }
        }
    }

    #[test]
    fn empty_budget_reconstructs_zero() {
        let scheme = NonAdaptiveScheme::with_budgets(4, &[0], 0).unwrap();
        assert_eq!(scheme.reconstruct(0, &[]), vec![0.0; 4]);
        assert!(NonAdaptiveScheme::with_budgets(4, &[5], 0).is_err());
    }

    #[test]
    fn csv_layout() {
        let rows = lowerbound_experiment(8, 2, &standard_profiles(8, 2), 3, 1).unwrap();
        let csv = experiment_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next(),
            Some("budget_profile,trials,success_rate,mean_total_measurements")
        );
        assert_eq!(lines.count(), 4);
        assert_eq!(rows[0].success_rate, 1.0);
        assert_eq!(rows[1].success_rate, 0.0);
        assert_eq!(rows[3].success_rate, 1.0);
        assert!(lowerbound_experiment(8, 2, &[], 0, 1).is_err());
    }
}
