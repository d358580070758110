//! Synthetic instance generators.

use crate::error::{Error, Result};
use crate::matrix::SignalMatrix;
use crate::rng::{self, purpose};
use rand::seq::SliceRandom;
use rand::Rng;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    Planted,
    Adversarial,
    PowerLaw,
}

impl FromStr for InstanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "planted" => Ok(Self::Planted),
            "adversarial" => Ok(Self::Adversarial),
            "powerlaw" => Ok(Self::PowerLaw),
            other => Err(Error::input(format!("unknown instance kind `{other}`"))),
        }
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Planted => "planted",
            Self::Adversarial => "adversarial",
            Self::PowerLaw => "powerlaw",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceSpec {
    pub kind: InstanceKind,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    /// Total ℓ1 mass of the tail added outside the planted support.
    pub noise: f64,
    pub seed: u64,
}

pub fn generate(spec: &InstanceSpec) -> Result<SignalMatrix> {
    match spec.kind {
        InstanceKind::Planted => planted(spec.n, spec.m, spec.k, spec.noise, spec.seed),
        InstanceKind::PowerLaw => powerlaw(spec.n, spec.m, spec.k, spec.noise, spec.seed),
        InstanceKind::Adversarial => {
            Ok(crate::lowerbound::gen_adversarial(spec.n, spec.m, spec.seed)?.a)
        }
    }
}

fn check(n: usize, m: usize, k: usize, noise: f64) -> Result<()> {
    if n == 0 || m == 0 {
        return Err(Error::input("dimensions must be positive"));
    }
    if k < 1 || k > n {
        return Err(Error::input(format!("k must lie in [1, {n}], got {k}")));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::input("noise must be a finite nonnegative mass"));
    }
    Ok(())
}

fn random_sign<R: Rng>(rng: &mut R) -> f64 {
    if rng.random::<bool>() {
        1.0
    } else {
        -1.0
    }
}

/// Spreads total mass `noise` over `cells` with uniform random weights and
/// random signs. Returns the values and the largest magnitude.
fn tail_values<R: Rng>(rng: &mut R, cells: usize, noise: f64) -> (Vec<f64>, f64) {
    if cells == 0 || noise == 0.0 {
        return (vec![0.0; cells], 0.0);
    }
    let weights: Vec<f64> = (0..cells)
        .map(|_| rng.random::<f64>() + f64::MIN_POSITIVE)
        .collect();
    let total: f64 = weights.iter().sum();
    let values: Vec<f64> = weights
        .iter()
        .map(|w| random_sign(rng) * noise * w / total)
        .collect();
    let max = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    (values, max)
}

/// `km` entries at uniformly random positions with magnitudes at least 1,
/// plus a tail of total mass `noise` on the remaining entries.
///
/// Planted magnitudes are scaled above the largest tail entry, so the
/// optimal tail error of the result is `noise` up to rounding.
pub fn planted(n: usize, m: usize, k: usize, noise: f64, seed: u64) -> Result<SignalMatrix> {
    check(n, m, k, noise)?;
    let mut rng = rng::stream(seed, &[purpose::INSTANCE, 1]);
    let mut cells: Vec<usize> = (0..n * m).collect();
    cells.shuffle(&mut rng);
    let (support, rest) = cells.split_at(k * m);
    let (tail, max_tail) = tail_values(&mut rng, rest.len(), noise);
    let base = max_tail.max(1.0);
    let mut data = vec![0.0; n * m];
    for &c in support {
        data[c] = random_sign(&mut rng) * base * (1.0 + 9.0 * rng.random::<f64>());
    }
    for (&c, v) in rest.iter().zip(tail) {
        data[c] = v;
    }
    SignalMatrix::from_col_major(n, m, data)
}

/// Column sparsities proportional to `1/rank` over a random column order,
/// summing to `km` (each capped at `n`).
fn skewed_sparsities<R: Rng>(rng: &mut R, n: usize, m: usize, k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    let weights: Vec<f64> = (0..m).map(|r| 1.0 / (r + 1) as f64).collect();
    let wsum: f64 = weights.iter().sum();
    let budget = k * m;
    let mut sizes = vec![0usize; m];
    let mut assigned = 0;
    for (r, &col) in order.iter().enumerate() {
        let s = ((budget as f64 * weights[r] / wsum).floor() as usize).min(n);
        sizes[col] = s;
        assigned += s;
    }
    // Hand out what flooring and capping left over, heaviest columns first.
    let mut r = 0;
    while assigned < budget {
        let col = order[r % m];
        if sizes[col] < n {
            sizes[col] += 1;
            assigned += 1;
        }
        r += 1;
    }
    sizes
}

/// Power-law instance: column `j` holds `s_j` entries of magnitude
/// `rank^{-1.2}` at shuffled positions, with `s_j` skewed across columns
/// and averaging `k`. A tail of mass `noise` fills the remaining entries.
pub fn powerlaw(n: usize, m: usize, k: usize, noise: f64, seed: u64) -> Result<SignalMatrix> {
    check(n, m, k, noise)?;
    let mut rng = rng::stream(seed, &[purpose::INSTANCE, 2]);
    let sizes = skewed_sparsities(&mut rng, n, m, k);
    let mut data = vec![0.0; n * m];
    let mut off_support = Vec::new();
    for (j, &s) in sizes.iter().enumerate() {
        let mut rows: Vec<usize> = (0..n).collect();
        rows.shuffle(&mut rng);
        for (rank, &i) in rows[..s].iter().enumerate() {
            data[j * n + i] = random_sign(&mut rng) * ((rank + 1) as f64).powf(-1.2);
        }
        off_support.extend(rows[s..].iter().map(|&i| j * n + i));
    }
    let (tail, _) = tail_values(&mut rng, off_support.len(), noise);
    for (&c, v) in off_support.iter().zip(tail) {
        data[c] = v;
    }
    SignalMatrix::from_col_major(n, m, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::optimal_tail_error;

    #[test]
    fn planted_noiseless_is_km_sparse() {
        let a = planted(32, 6, 3, 0.0, 4).unwrap();
        assert_eq!(a.nnz(), 18);
        assert_eq!(optimal_tail_error(&a, 3).unwrap().value(), 0.0);
        assert!(a.as_col_major().iter().all(|v| *v == 0.0 || v.abs() >= 1.0));
    }

    #[test]
    fn planted_tail_mass() {
        for seed in 0..5 {
            let a = planted(64, 8, 2, 3.0, seed).unwrap();
            assert!((optimal_tail_error(&a, 2).unwrap().value() - 3.0).abs() <= 1e-9);
        }
        // Heavy noise still leaves the planted support on top.
        let a = planted(4, 2, 1, 50.0, 1).unwrap();
        assert!((optimal_tail_error(&a, 1).unwrap().value() - 50.0).abs() <= 1e-9);
    }

    #[test]
    fn powerlaw_support_sizes() {
        let (n, m, k) = (64, 10, 4);
        let a = powerlaw(n, m, k, 0.0, 2).unwrap();
        let sizes: Vec<usize> = (0..m)
            .map(|j| a.column(j).iter().filter(|v| **v != 0.0).count())
            .collect();
        assert_eq!(sizes.iter().sum::<usize>(), k * m);
        assert!(sizes.iter().max() > sizes.iter().min());
        assert!(a.as_col_major().iter().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn deterministic_and_validated() {
        assert_eq!(
            planted(16, 4, 2, 1.0, 9).unwrap(),
            planted(16, 4, 2, 1.0, 9).unwrap()
        );
        assert_ne!(
            planted(16, 4, 2, 1.0, 9).unwrap(),
            planted(16, 4, 2, 1.0, 10).unwrap()
        );
        assert!(planted(16, 4, 0, 1.0, 0).is_err());
        assert!(planted(16, 4, 17, 1.0, 0).is_err());
        assert!(planted(16, 4, 2, -1.0, 0).is_err());
        assert!(matches!(
            "banana".parse::<InstanceKind>(),
            Err(Error::Input(_))
        ));
    }
}
