use batchrec::oracle::{
    agrees, best_s_term_error, matrix_residual_l1, optimal_tail_error, truncate_top_s,
};
use batchrec::{SignalMatrix, SparseMatrix, SparseVector};
use proptest::prelude::*;

/// Smallest ℓ1 mass outside a support of exactly `min(keep, len)`
/// positions, over every such support.
fn enumerate_tail(values: &[f64], keep: usize) -> f64 {
    let len = values.len();
    let size = keep.min(len) as u32;
    (0u32..1 << len)
        .filter(|mask| mask.count_ones() == size)
        .map(|mask| {
            (0..len)
                .filter(|i| mask & (1 << i) == 0)
                .map(|i| values[i].abs())
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min)
}

fn quarter() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), (-40i32..=40).prop_map(|q| q as f64 / 4.0)]
}

fn small_matrix(max_cells: usize) -> impl Strategy<Value = SignalMatrix> {
    (1usize..=max_cells)
        .prop_flat_map(move |n| (Just(n), 1usize..=(max_cells / n).max(1)))
        .prop_flat_map(|(n, m)| (Just(n), Just(m), prop::collection::vec(quarter(), n * m)))
        .prop_map(|(n, m, data)| SignalMatrix::from_col_major(n, m, data).unwrap())
}

/// `v` plus a random subset of its support, as a sparse vector agreeing
/// with it.
fn agreeing_pair() -> impl Strategy<Value = (Vec<f64>, SparseVector)> {
    prop::collection::vec(prop_oneof![Just(0.0), -1e3f64..1e3], 1..48).prop_flat_map(|v| {
        let n = v.len();
        (Just(v), prop::collection::vec(any::<bool>(), n)).prop_map(|(v, keep)| {
            let entries = v
                .iter()
                .enumerate()
                .filter(|(i, x)| **x != 0.0 && keep[*i])
                .map(|(i, x)| (i, *x))
                .collect();
            let u = SparseVector::from_entries(v.len(), entries).unwrap();
            (v, u)
        })
    })
}

fn subset_of(x: &[f64], keep: &[bool]) -> SparseVector {
    let entries = x
        .iter()
        .enumerate()
        .filter(|(i, v)| **v != 0.0 && keep[*i % keep.len()])
        .map(|(i, v)| (i, *v))
        .collect();
    SparseVector::from_entries(x.len(), entries).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn difference_agrees_with_original((v, u) in agreeing_pair()) {
        prop_assert!(agrees(&u, &v).unwrap());
        let d: Vec<f64> = v.iter().zip(u.to_dense()).map(|(a, b)| a - b).collect();
        prop_assert!(agrees(&SparseVector::from_dense(&d), &v).unwrap());
    }

    #[test]
    fn agreeing_vector_has_smaller_l1((v, u) in agreeing_pair()) {
        let l1: f64 = v.iter().map(|x| x.abs()).sum();
        prop_assert!(u.l1() <= l1);
    }

    #[test]
    fn agreement_composes((v, u) in agreeing_pair(), keep in prop::collection::vec(any::<bool>(), 1..48)) {
        let d: Vec<f64> = v.iter().zip(u.to_dense()).map(|(a, b)| a - b).collect();
        let w = subset_of(&d, &keep);
        prop_assert!(agrees(&w, &d).unwrap());
        prop_assert!(agrees(&u.add(&w).unwrap(), &v).unwrap());
    }

    #[test]
    fn agreement_is_not_symmetric_on_strict_subsets((v, u) in agreeing_pair()) {
        let full = SparseVector::from_dense(&v);
        if u.nnz() < full.nnz() {
            prop_assert!(!agrees(&full, &u.to_dense()).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tail_error_matches_enumeration_up_to_twenty_cells(a in small_matrix(20), k_seed in 0usize..64) {
        let k = 1 + k_seed % a.n();
        let brute = enumerate_tail(a.as_col_major(), k * a.m());
        prop_assert_eq!(optimal_tail_error(&a, k).unwrap().value(), brute);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn truncation_is_closest_s_sparse(a in small_matrix(12), s_seed in 0usize..64) {
        let s = s_seed % (a.n() * a.m() + 1);
        let t = truncate_top_s(&SparseMatrix::from_dense(&a), s);
        prop_assert!(t.nnz() <= s);
        prop_assert!(t.entries().iter().all(|&(i, j, v)| a.get(i, j) == v));
        prop_assert_eq!(matrix_residual_l1(&a, &t).unwrap(), enumerate_tail(a.as_col_major(), s));
    }

    #[test]
    fn tail_error_is_monotone_in_k(a in small_matrix(40)) {
        let errs: Vec<f64> = (1..=a.n()).map(|k| optimal_tail_error(&a, k).unwrap().value()).collect();
        prop_assert!(errs.windows(2).all(|w| w[1] <= w[0]));
        prop_assert_eq!(*errs.last().unwrap(), 0.0);
    }

    #[test]
    fn single_column_tail_is_best_s_term(x in prop::collection::vec(quarter(), 1..30), k_seed in 0usize..30) {
        let k = 1 + k_seed % x.len();
        let a = SignalMatrix::from_columns(std::slice::from_ref(&x)).unwrap();
        prop_assert_eq!(optimal_tail_error(&a, k).unwrap().value(), best_s_term_error(&x, k));
    }
}

#[test]
fn tail_error_rejects_out_of_range_k() {
    let a = SignalMatrix::zeros(4, 2).unwrap();
    assert!(optimal_tail_error(&a, 0).is_err());
    assert!(optimal_tail_error(&a, 5).is_err());
}

#[test]
fn tie_break_prefers_smaller_column_then_row() {
    let a = SignalMatrix::from_columns(&[vec![0.0, 2.0, -2.0], vec![2.0, 1.0, 0.0]]).unwrap();
    let t = truncate_top_s(&SparseMatrix::from_dense(&a), 2);
    assert_eq!(t.entries(), &[(1, 0, 2.0), (2, 0, -2.0)]);
}
