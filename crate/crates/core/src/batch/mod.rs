//! Batch recovery of `m` columns under a shared `km` sparsity budget.
//!
//! [`batch_recover_const`] is the halving scheme with a constant-factor
//! guarantee; [`batch_recover_eps`] refines its output to within `(1+ε)` of
//! the optimal tail error using a bucketed measurement budget.

mod bounds;
mod halving;
mod refine;

pub use bounds::{measurement_bound, measurement_bound_check, unit_cost};
pub use halving::{
    batch_recover_const, ConstOutcome, HalvingState, IterationTrace, CONST_INNER_EPS,
};
pub use refine::{batch_recover_eps, BucketState, EpsOutcome, REFINE_BUDGET_CONSTANT};

use crate::primitives::RecoveryMode;
use serde::{Deserialize, Serialize};

/// Which batch scheme produced a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Algorithm {
    Constant,
    Refined { eps: f64 },
}

/// `⌈log₂(2m)⌉`, the number of halving iterations.
pub fn halving_iterations(m: usize) -> usize {
    let target = 2 * m.max(1);
    let mut l = 0;
    while (1usize << l) < target {
        l += 1;
    }
    l
}

/// Adaptive rounds used by one halving iteration: idealized recovery
/// needs one; sketch recovery adds a coordinate-probe round.
pub fn rounds_per_recovery(mode: RecoveryMode) -> usize {
    match mode {
        RecoveryMode::Idealized => 1,
        RecoveryMode::Sketch => 2,
    }
}

/// Ledger rounds of a complete run. For the refined scheme this assumes a
/// nonzero residual; an all-zero residual skips the refinement round(s).
pub fn expected_rounds(algorithm: Algorithm, m: usize, mode: RecoveryMode) -> usize {
    let halving = halving_iterations(m) * rounds_per_recovery(mode);
    match algorithm {
        Algorithm::Constant => halving,
        Algorithm::Refined { .. } => halving + 1 + rounds_per_recovery(mode),
    }
}
