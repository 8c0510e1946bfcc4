//! Binomial coefficients and colexicographic ranking of r-sets.

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// `C(n, k)` as an exact big integer; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `C(n, k)` with saturation at `u128::MAX`; used for size guards.
pub fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = match acc.checked_mul(n as u128 - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Signed variant of [`binomial`] that treats negative tops as an empty choice.
pub fn binomial_signed(n: i64, k: u64) -> BigUint {
    if n < 0 {
        BigUint::zero()
    } else {
        binomial(n as u64, k)
    }
}

/// Pascal table for colex ranking of r-sets of `[0, n)`.
#[derive(Clone, Debug)]
pub struct ColexRanker {
    r: usize,
    table: Vec<Vec<u64>>,
}

impl ColexRanker {
    pub fn new(n: usize, r: usize) -> Self {
        let mut table = vec![vec![0u64; r + 1]; n + 1];
        for (a, row) in table.iter_mut().enumerate() {
            row[0] = 1;
            for (b, cell) in row.iter_mut().enumerate().take(r.min(a) + 1).skip(1) {
                *cell = binomial_u128(a as u64, b as u64).min(u64::MAX as u128) as u64;
            }
        }
        ColexRanker { r, table }
    }

    /// Rank of a strictly increasing tuple among all r-sets in colex order.
    pub fn rank(&self, edge: &[usize]) -> u64 {
        debug_assert_eq!(edge.len(), self.r);
        edge.iter().enumerate().map(|(i, &v)| self.table[v][i + 1]).sum()
    }
}

/// Compares two r-sets in colexicographic order (largest element first).
pub fn colex_cmp(a: &[usize], b: &[usize]) -> std::cmp::Ordering {
    a.iter().rev().cmp(b.iter().rev())
}
