use super::{halving_iterations, Algorithm, CONST_INNER_EPS};
use crate::measurement::LedgerSnapshot;
use crate::primitives::{accuracy_factor, log2_dim, RecoveryConfig, RecoveryMode};

/// Per-`(s · log₂ n)` cost of one sparse recovery at accuracy `eps`.
///
/// Idealized recovery charges `c_rec · ε^{-1/2} · max(1, ln³(1/ε))`. A count
/// sketch uses `4s · ⌈8 log₂ n⌉` rows plus `s` probes, at most `37 s log₂ n`.
pub fn unit_cost(cfg: &RecoveryConfig, eps: f64) -> f64 {
    match cfg.mode {
        RecoveryMode::Idealized => cfg.cost_constant * accuracy_factor(eps),
        RecoveryMode::Sketch => 37.0,
    }
}

/// Upper bound on the total measurements of a run, derived from the charging
/// rules rather than fit to data.
///
/// Every recovery of sparsity `s` costs at most `u(ε) · s · L + 1` and every
/// norm estimate at most `c_norm · L + 1`, with `L = max(1, log₂ n)`.
/// Halving iteration `ℓ` has at most `2m / 2^{ℓ-1}` active columns at
/// sparsity `2^{ℓ+1} k`, so it costs at most `(8u + 2c_norm + 4) · kmL`.
/// Refinement adds one norm round and, per bucket, at most
/// `u(ε) · L · (100mk/ε + |E_i|) + |E_i|`.
pub fn measurement_bound(
    algorithm: Algorithm,
    n: usize,
    m: usize,
    k: usize,
    cfg: &RecoveryConfig,
) -> f64 {
    let l = log2_dim(n);
    let (m_f, k_f) = (m as f64, k as f64);
    let c_norm = cfg.norm_rows_constant;
    let per_iteration = 8.0 * unit_cost(cfg, CONST_INNER_EPS) + 2.0 * c_norm + 4.0;
    let halving = per_iteration * k_f * m_f * l * halving_iterations(m) as f64;
    match algorithm {
        Algorithm::Constant => halving,
        Algorithm::Refined { eps } => {
            // Normalise the refinement cost by the growth term
            // ε^{-3/2} · max(1, ln³(1/ε)) · kmL · log₂(2m/ε).
            let growth = eps.powf(-1.5)
                * (1.0 / eps).ln().powi(3).max(1.0)
                * k_f
                * m_f
                * l
                * (2.0 * m_f / eps).log2();
            let c_u = unit_cost(cfg, eps) * eps.sqrt() / (1.0 / eps).ln().powi(3).max(1.0);
            let c_bound = 2.0 * per_iteration + (c_norm + 1.0) + 100.0 * c_u + c_u + 1.0;
            c_bound * growth
        }
    }
}

/// True iff the run's ledger total respects [`measurement_bound`].
pub fn measurement_bound_check(
    snapshot: &LedgerSnapshot,
    algorithm: Algorithm,
    n: usize,
    m: usize,
    k: usize,
    cfg: &RecoveryConfig,
) -> bool {
    snapshot.total as f64 <= measurement_bound(algorithm, n, m, k, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snapshot(t_j: Vec<u64>) -> LedgerSnapshot {
        let total = t_j.iter().sum();
        LedgerSnapshot {
            t_j,
            total,
            rounds: 0,
        }
    }

    #[test]
    fn zero_report_conforms() {
        let cfg = RecoveryConfig::default();
        assert!(measurement_bound_check(
            &snapshot(vec![0; 8]),
            Algorithm::Constant,
            64,
            8,
            1,
            &cfg
        ));
        assert!(measurement_bound_check(
            &snapshot(vec![0; 8]),
            Algorithm::Refined { eps: 0.1 },
            64,
            8,
            1,
            &cfg
        ));
    }

    #[test]
    fn quadratic_column_charge_fails() {
        let cfg = RecoveryConfig::default();
        let n = 256u64;
        let mut t = vec![0; 8];
        t[3] = n * n;
        assert!(!measurement_bound_check(
            &snapshot(t),
            Algorithm::Constant,
            n as usize,
            8,
            1,
            &cfg
        ));
    }

    #[test]
    fn refined_bound_exceeds_constant_bound() {
        let cfg = RecoveryConfig::default();
        let c = measurement_bound(Algorithm::Constant, 128, 16, 2, &cfg);
        for eps in [0.5, 0.25, 0.125] {
            assert!(measurement_bound(Algorithm::Refined { eps }, 128, 16, 2, &cfg) > c);
        }
    }
}
