use super::{accuracy_factor, check_eps, log2_dim, norm::median, RecoveryConfig, RecoveryMode};
use crate::error::{Error, Result};
use crate::matrix::SparseVector;
use crate::measurement::{ColumnHandle, IdealizedAccess};
use crate::oracle::top_s_of_vector;
use crate::rng::{self, purpose};
use rand::Rng;

/// Idealized measurement cost of `s`-sparse recovery at accuracy `eps`:
/// `⌈c · ε^{-1/2} · max(1, ln³(1/ε)) · s · log₂ n⌉`.
pub fn recovery_charge(n: usize, s: usize, eps: f64, cost_constant: f64) -> u64 {
    (cost_constant * accuracy_factor(eps) * s as f64 * log2_dim(n)).ceil() as u64
}

/// `(repetitions, buckets)` of the count sketch used for `s`-sparse recovery
/// on dimension `n`.
pub fn sketch_shape(n: usize, s: usize) -> (usize, usize) {
    let reps = (8.0 * log2_dim(n)).ceil() as usize;
    (reps, 4 * s.max(1))
}

/// Stable `s`-sparse recovery of the vector behind `h`.
///
/// `s` larger than the dimension is clamped, which makes idealized
/// recovery exact. In sketch mode the returned values are median
/// estimates; pair with [`probe_support`] in a later round to make the
/// output agree with the measured vector.
pub fn sparse_recover(
    h: &ColumnHandle<'_>,
    s: usize,
    eps: f64,
    cfg: &RecoveryConfig,
) -> Result<SparseVector> {
    check_eps(eps)?;
    if s == 0 {
        return Err(Error::input("sparsity must be at least 1"));
    }
    let n = h.dim();
    let s = s.min(n);
    match cfg.mode {
        RecoveryMode::Idealized => {
            let charge = recovery_charge(n, s, eps, cfg.cost_constant);
            let x = h.idealized_read(&IdealizedAccess::grant(), charge)?;
            Ok(top_s_of_vector(&x, s))
        }
        RecoveryMode::Sketch => count_sketch_recover(h, s, cfg),
    }
}

fn count_sketch_recover(
    h: &ColumnHandle<'_>,
    s: usize,
    cfg: &RecoveryConfig,
) -> Result<SparseVector> {
    let n = h.dim();
    let round = h
        .ledger()
        .current_round()
        .ok_or_else(|| Error::usage("sparse recovery outside an open round"))?;
    let (reps, buckets) = sketch_shape(n, s);
    let mut rng = rng::stream(
        cfg.seed,
        &[h.column() as u64, round, purpose::SPARSE_RECOVERY, s as u64],
    );

    // estimates[i] collects sign * bucket value over repetitions.
    let mut estimates = vec![Vec::with_capacity(reps); n];
    let mut queries: Vec<Vec<(usize, f64)>> = vec![Vec::new(); buckets];
    let mut assignment = Vec::with_capacity(n);
    for _ in 0..reps {
        queries.iter_mut().for_each(Vec::clear);
        assignment.clear();
        for i in 0..n {
            let b = rng.random_range(0..buckets);
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            queries[b].push((i, sign));
            assignment.push((b, sign));
        }
        let mut values = Vec::with_capacity(buckets);
        for q in &queries {
            values.push(h.measure_sparse(q)?);
        }
        for (i, &(b, sign)) in assignment.iter().enumerate() {
            estimates[i].push(sign * values[b]);
        }
    }
    let point: Vec<f64> = estimates.iter_mut().map(|e| median(e)).collect();
    Ok(top_s_of_vector(&point, s))
}

/// Replaces the values of `candidate` with exact coordinate probes, one
/// measurement per support entry. Entries probing to zero are dropped.
pub fn probe_support(h: &ColumnHandle<'_>, candidate: &SparseVector) -> Result<SparseVector> {
    let mut out = Vec::with_capacity(candidate.nnz());
    for &(i, _) in candidate.entries() {
        out.push((i, h.measure_sparse(&[(i, 1.0)])?));
    }
    SparseVector::from_entries(h.dim(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::SignalMatrix;
    use crate::measurement::Ledger;
    use crate::oracle::{agrees, best_s_term_error, vector_residual_l1};

    fn single(x: Vec<f64>) -> SignalMatrix {
        SignalMatrix::from_columns(&[x]).unwrap()
    }

    #[test]
    fn charge_formula() {
        // eps = 1/2: 2^{1/2} * max(1, ln^3 2) = sqrt 2.
        assert_eq!(
            recovery_charge(256, 3, 0.5, 1.0),
            (2f64.sqrt() * 3.0 * 8.0).ceil() as u64
        );
        // ln^3(1/eps) > 1 for small eps.
        let eps: f64 = 0.05;
        let expected = (eps.powf(-0.5) * (1.0 / eps).ln().powi(3) * 2.0 * 6.0).ceil() as u64;
        assert_eq!(recovery_charge(64, 2, eps, 1.0), expected);
        assert_eq!(recovery_charge(1, 1, 0.5, 1.0), 2);
    }

    #[test]
    fn idealized_exactly_sparse_is_exact() {
        let a = single(vec![0.0, 3.0, 0.0, -1.0, 0.0, 0.0, 0.0, 5.0]);
        let ledger = Ledger::new(1);
        let h = ColumnHandle::new(&a, &ledger, 0).unwrap();
        ledger.begin_round().unwrap();
        let x = sparse_recover(&h, 3, 0.5, &RecoveryConfig::default()).unwrap();
        assert_eq!(x.to_dense(), a.column(0));
        assert_eq!(ledger.total(), recovery_charge(8, 3, 0.5, 1.0));
    }

    #[test]
    fn idealized_top_one() {
        let a = single(vec![10.0, 1.0, 1.0, 1.0]);
        let ledger = Ledger::new(1);
        let h = ColumnHandle::new(&a, &ledger, 0).unwrap();
        ledger.begin_round().unwrap();
        let x = sparse_recover(&h, 1, 0.5, &RecoveryConfig::default()).unwrap();
        assert_eq!(x.entries(), &[(0, 10.0)]);
        let residual = vector_residual_l1(a.column(0), &x);
        // Brute force over the four 1-sparse supports.
        let brute = (0..4)
            .map(|i| {
                (0..4)
                    .filter(|&j| j != i)
                    .map(|j| a.column(0)[j].abs())
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min);
        assert_eq!(residual, 3.0);
        assert_eq!(residual, brute);
        assert!(agrees(&x, a.column(0)).unwrap());
    }

    #[test]
    fn validation() {
        let a = single(vec![1.0, 2.0]);
        let ledger = Ledger::new(1);
        let h = ColumnHandle::new(&a, &ledger, 0).unwrap();
        let cfg = RecoveryConfig::default();
        assert!(matches!(
            sparse_recover(&h, 1, 0.5, &cfg),
            Err(Error::Usage(_))
        ));
        ledger.begin_round().unwrap();
        assert!(sparse_recover(&h, 1, 1.0, &cfg).is_err());
        assert!(sparse_recover(&h, 1, 0.0, &cfg).is_err());
        assert!(sparse_recover(&h, 0, 0.5, &cfg).is_err());
        // Clamped to n: full recovery.
        assert_eq!(
            sparse_recover(&h, 10, 0.5, &cfg).unwrap().to_dense(),
            vec![1.0, 2.0]
        );
        assert_eq!(ledger.total(), recovery_charge(2, 2, 0.5, 1.0));
    }

    #[test]
    fn sketch_charges_its_rows_and_probes_agree() {
        let mut x = vec![0.0; 64];
        x[5] = 9.0;
        x[40] = -4.0;
        x[17] = 0.01;
        let a = single(x);
        let ledger = Ledger::new(1);
        let h = ColumnHandle::new(&a, &ledger, 0).unwrap();
        ledger.begin_round().unwrap();
        let cfg = RecoveryConfig::sketch(3);
        let est = sparse_recover(&h, 2, 0.5, &cfg).unwrap();
        let (reps, buckets) = sketch_shape(64, 2);
        assert_eq!(ledger.total(), (reps * buckets) as u64);
        assert_eq!(est.nnz(), 2);
        ledger.end_round().unwrap();
        ledger.begin_round().unwrap();
        let probed = probe_support(&h, &est).unwrap();
        assert!(agrees(&probed, a.column(0)).unwrap());
        assert_eq!(ledger.total(), (reps * buckets + 2) as u64);
        assert!(
            vector_residual_l1(a.column(0), &probed) <= 3.0 * best_s_term_error(a.column(0), 2)
        );
    }

    #[test]
    fn sketch_finds_dominant_entry() {
        let a = single(vec![10.0, 1.0, 1.0, 1.0]);
        let mut hits = 0;
        for seed in 0..200 {
            let ledger = Ledger::new(1);
            let h = ColumnHandle::new(&a, &ledger, 0).unwrap();
            ledger.begin_round().unwrap();
            let x = sparse_recover(&h, 1, 0.5, &RecoveryConfig::sketch(seed)).unwrap();
            assert!(ledger.total() >= 16);
            if x.entries().first().map(|e| e.0) == Some(0) {
                hits += 1;
            }
        }
        assert!(hits >= 190, "top entry found in {hits}/200 runs");
    }
}
