//! Fixtures shared by the criterion benches.

use batchrec::gen::planted;
use batchrec::SignalMatrix;

/// A planted instance with unit tail mass, fixed seed.
pub fn planted_fixture(n: usize, m: usize, k: usize) -> SignalMatrix {
    planted(n, m, k, 1.0, 7).expect("valid fixture dimensions")
}
