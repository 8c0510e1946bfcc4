//! Extremal families for crossing paths and their counting identities.
//!
//! Vertices are `0..n`; all generators return linear-mode hypergraphs with
//! canonically sorted edges. Use [`Hypergraph::with_mode`] to read a family
//! cyclically.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::binomial;
use crate::error::{invalid, Error, Result};
use crate::hypergraph::{Edge, Hypergraph, Mode};
use crate::par;

/// Named families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    /// Some consecutive pair among the first `k-1` gaps (`k <= r`).
    Consecutive,
    /// `k = r + 1`: any consecutive pair, or last entry `n-1`.
    ConsecutivePlusLast,
    /// First gap a power of two at most `n/4`.
    Pow2Gap,
}

impl fmt::Display for FamilyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyName::Consecutive => "consecutive",
            FamilyName::ConsecutivePlusLast => "consecutive_plus_last",
            FamilyName::Pow2Gap => "pow2gap",
        })
    }
}

impl FromStr for FamilyName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "consecutive" => Ok(FamilyName::Consecutive),
            "consecutive_plus_last" => Ok(FamilyName::ConsecutivePlusLast),
            "pow2gap" | "pow2" => Ok(FamilyName::Pow2Gap),
            _ => Err(invalid(format!("unknown family `{s}`"))),
        }
    }
}

/// A family together with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FamilySpec {
    pub name: FamilyName,
    pub n: usize,
    pub r: usize,
    /// Path length the family avoids; `r + 2` for the power-of-two family.
    pub k: usize,
}

impl FamilySpec {
    /// Picks the name from `k` for the consecutive families.
    pub fn consecutive(n: usize, r: usize, k: usize) -> Self {
        let name = if k == r + 1 { FamilyName::ConsecutivePlusLast } else { FamilyName::Consecutive };
        FamilySpec { name, n, r, k }
    }

    pub fn pow2(n: usize, r: usize) -> Self {
        FamilySpec { name: FamilyName::Pow2Gap, n, r, k: r + 2 }
    }

    pub fn build(&self) -> Result<Hypergraph> {
        match self.name {
            FamilyName::Consecutive if self.k > self.r => {
                Err(invalid(format!("`consecutive` needs k <= r, got k = {} with r = {}", self.k, self.r)))
            }
            FamilyName::ConsecutivePlusLast if self.k != self.r + 1 => {
                Err(invalid(format!("`consecutive_plus_last` needs k = r + 1, got k = {} with r = {}", self.k, self.r)))
            }
            FamilyName::Consecutive | FamilyName::ConsecutivePlusLast => consecutive_family(self.n, self.r, self.k),
            FamilyName::Pow2Gap => pow2_family(self.n, self.r),
        }
    }
}

/// All increasing r-tuples whose first element is `a1`, filtered, in lex order.
fn tuples_by_first<F>(n: usize, r: usize, keep: F) -> Vec<Edge>
where
    F: Fn(&[usize]) -> bool + Sync + Send,
{
    let chunks = par::map((0..n).collect(), |a1| {
        (a1 + 1..n)
            .combinations(r - 1)
            .map(|rest| {
                let mut e = Vec::with_capacity(r);
                e.push(a1);
                e.extend(rest);
                e
            })
            .filter(|e| keep(e))
            .collect::<Vec<_>>()
    });
    chunks.into_iter().flatten().collect()
}

fn check_r(r: usize) -> Result<()> {
    if r < 2 {
        return Err(invalid(format!("uniformity must be at least 2, got {r}")));
    }
    Ok(())
}

/// Tuples with a consecutive pair among their first `k-1` gaps; for
/// `k = r + 1` also every tuple ending at `n-1`. Avoids `CP_k^r`.
pub fn consecutive_family(n: usize, r: usize, k: usize) -> Result<Hypergraph> {
    check_r(r)?;
    if k == 0 || k > r + 1 {
        return Err(invalid(format!("k must lie in 1..={}, got {k}", r + 1)));
    }
    if n < r {
        return Err(invalid(format!("need n >= r, got n = {n}, r = {r}")));
    }
    let gaps = (k - 1).min(r - 1);
    let plus_last = k == r + 1;
    let edges =
        tuples_by_first(n, r, |e| e[..=gaps].windows(2).any(|w| w[1] == w[0] + 1) || (plus_last && e[r - 1] == n - 1));
    Ok(Hypergraph::from_sorted_unchecked(n, r, Mode::Linear, edges))
}

/// Tuples whose first gap is `2^p` with `p >= 0` and `4 * 2^p <= n`.
/// Requires `r >= 3`; see [`pow2_family_with`] for `r = 2`.
pub fn pow2_family(n: usize, r: usize) -> Result<Hypergraph> {
    pow2_family_with(n, r, false)
}

/// [`pow2_family`] with an opt-in for `r = 2`, where the counting bound does
/// not apply but the family is still well defined.
pub fn pow2_family_with(n: usize, r: usize, allow_r2: bool) -> Result<Hypergraph> {
    check_r(r)?;
    if r < 3 && !allow_r2 {
        return Err(invalid("the power-of-two family needs r >= 3 (r = 2 must be requested explicitly)"));
    }
    if n < 8 {
        return Err(invalid(format!("the power-of-two family needs n >= 8, got {n}")));
    }
    let edges = tuples_by_first(n, r, |e| {
        let gap = e[1] - e[0];
        gap.is_power_of_two() && 4 * gap <= n
    });
    Ok(Hypergraph::from_sorted_unchecked(n, r, Mode::Linear, edges))
}

/// Exact size of [`pow2_family`]: the sum over allowed gaps `g` of
/// `C(n - g, r - 1)`.
pub fn pow2_family_count(n: usize, r: usize) -> BigUint {
    let mut total = BigUint::zero();
    let mut g = 1usize;
    while 4 * g <= n {
        total += binomial((n - g) as u64, (r - 1) as u64);
        g *= 2;
    }
    total
}

/// Whether `count >= n^(r-1) / ((r-2)! 3^r) * log2(n)` holds, decided
/// exactly: with `count (r-2)! 3^r / n^(r-1) = a/b` in lowest terms the
/// inequality is `2^a >= n^b`.
pub fn pow2_count_bound_holds(n: usize, r: usize, count: &BigUint) -> Result<bool> {
    if r < 3 || n < 2 {
        return Err(invalid("the count bound needs r >= 3 and n >= 2"));
    }
    let fact: BigUint = (1..=(r - 2) as u64).map(BigUint::from).product();
    let num = count * fact * BigUint::from(3u32).pow(r as u32);
    let den = BigUint::from(n).pow((r - 1) as u32);
    if n.is_power_of_two() {
        let log = BigUint::from(n.trailing_zeros());
        return Ok(num >= den * log);
    }
    let g = num_integer::Integer::gcd(&num, &den);
    let (a, b) = (&num / &g, &den / &g);
    const LIMIT: u64 = 1 << 24;
    let exp = a.clone().max(&b * 64u32);
    match (u64::try_from(&a), u32::try_from(&b)) {
        (Ok(a), Ok(b)) if a <= LIMIT && u64::from(b) * 64 <= LIMIT => {
            Ok(BigUint::one() << a >= BigUint::from(n).pow(b))
        }
        _ => Err(Error::TooLarge {
            what: "exponent in the count bound",
            size: u128::try_from(&exp).unwrap_or(u128::MAX),
            limit: LIMIT as u128,
        }),
    }
}

/// Outcomes of the shifting procedure: take an increasing r-tuple in
/// `0..n-k+1` and raise entry `j` (0-based) by `min(j, k-1)`. These are
/// exactly the r-sets missing from [`consecutive_family`].
pub fn complement_enumerator(n: usize, r: usize, k: usize) -> Result<Hypergraph> {
    check_r(r)?;
    if k == 0 || k > r + 1 {
        return Err(invalid(format!("k must lie in 1..={}, got {k}", r + 1)));
    }
    if n + 1 < r + k {
        return Err(invalid(format!("need n >= r + k - 1 = {}, got {n}", r + k - 1)));
    }
    let base = n - k + 1;
    let edges: Vec<Edge> =
        (0..base).combinations(r).map(|t| t.iter().enumerate().map(|(j, &a)| a + j.min(k - 1)).collect()).collect();
    let mut edges = edges;
    edges.sort_unstable();
    Ok(Hypergraph::from_sorted_unchecked(n, r, Mode::Linear, edges))
}

/// `C(n, r) - C(n - k + 1, r)`, with binomials of too-small tops read as 0.
pub fn closed_form_count(n: usize, r: usize, k: usize) -> Result<BigUint> {
    if k == 0 || k > r + 1 {
        return Err(invalid(format!("k must lie in 1..={}, got {k}", r + 1)));
    }
    let all = binomial(n as u64, r as u64);
    let missing = if n + 1 >= k { binomial((n + 1 - k) as u64, r as u64) } else { BigUint::zero() };
    Ok(all - missing)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(h: &Hypergraph) -> Vec<(usize, usize)> {
        h.edges().iter().map(|e| (e[0], e[1])).collect()
    }

    #[test]
    fn consecutive_examples() {
        let h = consecutive_family(5, 2, 2).unwrap();
        assert_eq!(pairs(&h), vec![(0, 1), (1, 2), (2, 3), (3, 4)]);
        let h = consecutive_family(5, 2, 3).unwrap();
        assert_eq!(pairs(&h), vec![(0, 1), (0, 4), (1, 2), (1, 4), (2, 3), (2, 4), (3, 4)]);
        assert!(consecutive_family(9, 3, 1).unwrap().is_empty());
        assert!(consecutive_family(9, 3, 5).is_err());
        assert!(consecutive_family(9, 3, 0).is_err());
        assert!(consecutive_family(2, 3, 2).is_err());
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(closed_form_count(6, 2, 3).unwrap(), BigUint::from(9u32));
        assert_eq!(closed_form_count(7, 3, 4).unwrap(), BigUint::from(31u32));
        assert_eq!(closed_form_count(40, 4, 1).unwrap(), BigUint::zero());
        assert_eq!(closed_form_count(1, 2, 3).unwrap(), BigUint::zero());
    }

    #[test]
    fn pow2_examples() {
        let h = pow2_family(8, 3).unwrap();
        assert!(h.contains_edge(&[0, 2, 5]));
        assert!(!h.contains_edge(&[0, 3, 5]));
        assert!(!h.contains_edge(&[0, 4, 5]));
        assert_eq!(h.edge_count(), 36);
        assert_eq!(pow2_family_count(8, 3), BigUint::from(36u32));
        assert!(pow2_family(8, 2).is_err());
        assert!(pow2_family_with(8, 2, true).is_ok());
        assert!(pow2_family(7, 3).is_err());
    }

    #[test]
    fn count_bound() {
        for n in [64usize, 128] {
            let c = pow2_family_count(n, 3);
            assert!(pow2_count_bound_holds(n, 3, &c).unwrap());
            assert!(!pow2_count_bound_holds(n, 3, &BigUint::from(1u32)).unwrap());
        }
        assert!(pow2_count_bound_holds(100, 3, &pow2_family_count(100, 3)).unwrap());
    }

    #[test]
    fn shifting_procedure() {
        let h = complement_enumerator(5, 2, 2).unwrap();
        assert_eq!(h.edge_count(), 6);
        let g = consecutive_family(5, 2, 2).unwrap();
        assert!(h.edges().iter().all(|e| !g.contains_edge(e)));
        assert_eq!(complement_enumerator(6, 3, 4).unwrap().edge_count(), 1);
        assert!(complement_enumerator(5, 3, 4).is_err());
    }

    #[test]
    fn spec_dispatch() {
        assert_eq!(FamilySpec::consecutive(7, 3, 4).name, FamilyName::ConsecutivePlusLast);
        assert_eq!(FamilySpec::consecutive(7, 3, 3).build().unwrap().edge_count(), 35 - 10);
        let bad = FamilySpec { name: FamilyName::Consecutive, n: 7, r: 3, k: 4 };
        assert!(bad.build().is_err());
        assert_eq!("pow2gap".parse::<FamilyName>().unwrap(), FamilyName::Pow2Gap);
    }
}
