use std::collections::HashMap;

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Pow, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::format::{format_rational, ser_opt_rational, ser_rational};
use crate::hypergraph::{Edge, WeightedHypergraph};
use crate::patterns::Interval;

/// All r-sets taking one vertex from each of `r` ordered disjoint intervals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct IntervalBox {
    pub intervals: Vec<Interval>,
}

impl IntervalBox {
    pub fn contains(&self, set: &[usize]) -> bool {
        set.len() == self.intervals.len()
            && set.iter().zip(&self.intervals).all(|(&x, iv)| x >= iv.start && x < iv.start + iv.len)
    }

    /// Number of r-sets in the box.
    pub fn size(&self) -> BigUint {
        self.intervals.iter().map(|iv| BigUint::from(iv.len)).product()
    }

    pub fn max_len(&self) -> usize {
        self.intervals.iter().map(|iv| iv.len).max().unwrap_or(0)
    }
}

/// One level `t` of the hierarchy: the interval system `I_t` and the boxes
/// `J_t` it contributes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoxLevel {
    pub intervals: Vec<Interval>,
    /// `parents[i]` indexes the level `t-1` interval containing `intervals[i]`
    /// (0 for level 1, whose parent is the whole range).
    pub parents: Vec<usize>,
    pub boxes: Vec<IntervalBox>,
}

/// Boxes partitioning all r-subsets of `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoxDecomposition {
    pub n: usize,
    pub r: usize,
    pub levels: Vec<BoxLevel>,
}

impl BoxDecomposition {
    pub fn box_count(&self) -> usize {
        self.levels.iter().map(|l| l.boxes.len()).sum()
    }

    /// `r^(t(r-1)+1)` for the 1-based level `t`.
    pub fn level_bound(&self, t: usize) -> BigUint {
        BigUint::from(self.r).pow((t * (self.r - 1) + 1) as u32)
    }

    /// Whether `|J_t| <= r^(t(r-1)+1)` at every level.
    pub fn level_bounds_hold(&self) -> bool {
        self.levels.iter().enumerate().all(|(i, l)| BigUint::from(l.boxes.len()) <= self.level_bound(i + 1))
    }

    /// Every box containing `set`, as `(level index from 0, box index)`.
    pub fn locate(&self, set: &[usize]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (t, level) in self.levels.iter().enumerate() {
            for (b, bx) in level.boxes.iter().enumerate() {
                if bx.contains(set) {
                    out.push((t, b));
                }
            }
        }
        out
    }
}

/// Splits a run into `min(r, len)` near-equal children, shorter ones first.
fn split_run(iv: Interval, r: usize) -> Vec<Interval> {
    if iv.len <= 1 {
        return vec![iv];
    }
    let parts = r.min(iv.len);
    let base = iv.len / parts;
    let extra = iv.len % parts;
    let mut start = iv.start;
    (0..parts)
        .map(|i| {
            let len = base + usize::from(i >= parts - extra);
            let child = Interval::new(start, len);
            start += len;
            child
        })
        .collect()
}

/// Interval systems `I_1, I_2, ..` of `0..n`, each refining the previous by
/// near-equal r-ary splitting (singletons stay as they are), ending with all
/// singletons.
pub fn interval_systems(n: usize, r: usize) -> Vec<(Vec<Interval>, Vec<usize>)> {
    let mut out = Vec::new();
    let mut current = vec![Interval::new(0, n)];
    loop {
        let mut next = Vec::new();
        let mut parents = Vec::new();
        for (p, &iv) in current.iter().enumerate() {
            for child in split_run(iv, r) {
                next.push(child);
                parents.push(p);
            }
        }
        let done = next.iter().all(|iv| iv.len == 1);
        out.push((next.clone(), parents));
        current = next;
        if done {
            break;
        }
    }
    out
}

/// The box system: `J_1` is every box over `I_1`, and `J_t` collects the
/// level-`t` boxes not covered by a level-`(t-1)` box, i.e. those whose `r`
/// intervals do not have pairwise distinct parents.
pub fn box_decomposition(n: usize, r: usize) -> Result<BoxDecomposition> {
    if r < 2 {
        return Err(invalid(format!("boxes need r >= 2, got {r}")));
    }
    if n < r {
        return Err(invalid(format!("boxes need n >= r, got n = {n}, r = {r}")));
    }
    let levels = interval_systems(n, r)
        .into_iter()
        .enumerate()
        .map(|(t, (intervals, parents))| {
            let boxes = (0..intervals.len())
                .combinations(r)
                .filter(|idx| t == 0 || !idx.iter().map(|&i| parents[i]).all_unique())
                .map(|idx| IntervalBox { intervals: idx.iter().map(|&i| intervals[i]).collect() })
                .collect();
            BoxLevel { intervals, parents, boxes }
        })
        .collect();
    Ok(BoxDecomposition { n, r, levels })
}

/// A box whose weight exceeds `A * l^c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoxViolation {
    /// 1-based level.
    pub level: usize,
    pub intervals: Vec<Interval>,
    pub length: usize,
    #[serde(serialize_with = "ser_rational")]
    pub weight: BigRational,
}

/// Outcome of [`weighted_box_bound_check`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoxBoundReport {
    pub n: usize,
    pub r: usize,
    #[serde(serialize_with = "ser_rational")]
    pub a: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub c: BigRational,
    /// Number of nonzero-weight boxes inspected.
    pub boxes_checked: usize,
    pub hypothesis_holds: bool,
    pub violations: Vec<BoxViolation>,
    /// Least `A` for which the hypothesis holds; only defined for integer `c`.
    #[serde(serialize_with = "ser_opt_rational")]
    pub measured_a: Option<BigRational>,
    /// The summation constant `C = r^2`.
    pub constant: usize,
    #[serde(serialize_with = "ser_rational")]
    pub total: BigRational,
    /// `C A n^(r-1) floor(log2 n)` when `c = r - 1`, otherwise `C A n^c`
    /// (written as a decimal approximation when `c` is not an integer).
    pub conclusion_bound: String,
    pub conclusion_holds: bool,
}

impl BoxBoundReport {
    pub fn passed(&self) -> bool {
        self.hypothesis_holds && self.conclusion_holds
    }
}

fn int(x: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// `x <= base^c` for `x, base >= 0` and rational `c = p/q >= 0`, exactly:
/// `x^q <= base^p`.
fn le_rational_power(x: &BigRational, base: usize, c: &BigRational) -> bool {
    let p = c.numer().to_biguint().expect("nonnegative exponent");
    let q = c.denom().to_biguint().expect("positive denominator");
    let p = u32::try_from(&p).expect("exponent fits");
    let q = u32::try_from(&q).expect("exponent fits");
    Pow::pow(x, q) <= Pow::pow(&int(base), p)
}

/// Checks the box hypothesis `w(B) <= A l^c` over every box of every level
/// (`l` is the longest interval of the box, so near-equal splits are covered),
/// and then the conclusion `|w| <= C A n^(r-1) log n` for `c = r - 1` or
/// `|w| <= C A n^c` for `c > r - 1`, with `C = r^2` and `log n` read as
/// `floor(log2 n)`. Vertex order is read linearly.
pub fn weighted_box_bound_check(w: &WeightedHypergraph, a: &BigRational, c: &BigRational) -> Result<BoxBoundReport> {
    let r = w.r();
    let n = w.n();
    if r < 2 || n < r {
        return Err(invalid("the box bound needs r >= 2 and n >= r"));
    }
    if !a.is_positive() {
        return Err(invalid("A must be positive"));
    }
    if *c < int(r - 1) || *c > int(r) {
        return Err(invalid(format!("c must lie in [{}, {r}]", r - 1)));
    }
    let mut violations = Vec::new();
    let mut boxes_checked = 0;
    let mut measured: Option<BigRational> = None;
    for (t, (intervals, _)) in interval_systems(n, r).iter().enumerate() {
        let mut owner = vec![0usize; n];
        for (i, iv) in intervals.iter().enumerate() {
            owner[iv.start..iv.start + iv.len].fill(i);
        }
        let mut weights: HashMap<Edge, BigRational> = HashMap::new();
        for (e, x) in w.iter() {
            let idx: Edge = e.iter().map(|&v| owner[v]).collect();
            if idx.iter().all_unique() {
                *weights.entry(idx).or_insert_with(BigRational::zero) += x;
            }
        }
        let mut keys: Vec<_> = weights.into_iter().collect();
        keys.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        for (idx, weight) in keys {
            boxes_checked += 1;
            let ivs: Vec<Interval> = idx.iter().map(|&i| intervals[i]).collect();
            let length = ivs.iter().map(|iv| iv.len).max().expect("r >= 2");
            if c.is_integer() {
                let e = u32::try_from(c.to_integer()).expect("small exponent");
                let need = &weight / Pow::pow(&int(length), e);
                if measured.as_ref().is_none_or(|m| need > *m) {
                    measured = Some(need);
                }
            }
            if !le_rational_power(&(&weight / a), length, c) {
                violations.push(BoxViolation { level: t + 1, intervals: ivs, length, weight });
            }
        }
    }
    let constant = r * r;
    let total = w.total();
    let scaled = &total / (a * int(constant));
    let (conclusion_bound, conclusion_holds) = if *c == int(r - 1) {
        let log = if n >= 2 { n.ilog2() as usize } else { 0 };
        let bound = a * int(constant) * Pow::pow(&int(n), (r - 1) as u32) * int(log);
        (format_rational(&bound), total <= bound)
    } else {
        let approx = a_to_f64(a) * constant as f64 * (n as f64).powf(a_to_f64(c));
        let text = if c.is_integer() {
            format_rational(&(a * int(constant) * Pow::pow(&int(n), u32::try_from(c.to_integer()).expect("small"))))
        } else {
            format!("{approx:.6e}")
        };
        (text, le_rational_power(&scaled, n, c))
    };
    Ok(BoxBoundReport {
        n,
        r,
        a: a.clone(),
        c: c.clone(),
        boxes_checked,
        hypothesis_holds: violations.is_empty(),
        violations,
        measured_a: if c.is_integer() { Some(measured.unwrap_or_else(BigRational::zero)) } else { None },
        constant,
        total,
        conclusion_bound,
        conclusion_holds,
    })
}

fn a_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::pow2_family;
    use crate::hypergraph::{Hypergraph, Mode};

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn small_examples() {
        let d = box_decomposition(4, 2).unwrap();
        assert_eq!(d.levels.len(), 2);
        assert_eq!(d.levels[0].boxes, vec![IntervalBox { intervals: vec![Interval::new(0, 2), Interval::new(2, 2)] }]);
        assert_eq!(
            d.levels[1].boxes,
            vec![
                IntervalBox { intervals: vec![Interval::new(0, 1), Interval::new(1, 1)] },
                IntervalBox { intervals: vec![Interval::new(2, 1), Interval::new(3, 1)] },
            ]
        );
        let d = box_decomposition(9, 3).unwrap();
        assert_eq!(d.levels[0].boxes.len(), 1);
        assert_eq!(d.levels[0].boxes[0].size(), BigUint::from(27u32));
        assert_eq!(d.levels[1].boxes.len(), 57);
        assert!(d.level_bounds_hold());
        let d = box_decomposition(5, 5).unwrap();
        assert_eq!(d.levels.len(), 1);
        assert_eq!(d.box_count(), 1);
        assert!(box_decomposition(2, 3).is_err());
    }

    #[test]
    fn uneven_splits_nest() {
        for (n, r) in [(10, 3), (7, 2), (23, 4)] {
            let systems = interval_systems(n, r);
            let mut prev = vec![Interval::new(0, n)];
            for (ivs, parents) in &systems {
                assert_eq!(ivs.iter().map(|iv| iv.len).sum::<usize>(), n);
                for (iv, &p) in ivs.iter().zip(parents) {
                    let q = prev[p];
                    assert!(iv.start >= q.start && iv.start + iv.len <= q.start + q.len);
                }
                prev = ivs.clone();
            }
        }
    }

    #[test]
    fn complete_graph_bound() {
        let w = Hypergraph::complete(9, 3, Mode::Linear).unwrap().to_weighted();
        let report = weighted_box_bound_check(&w, &rat(1, 1), &rat(3, 1)).unwrap();
        assert!(report.hypothesis_holds);
        assert!(report.conclusion_holds);
        assert_eq!(report.measured_a, Some(rat(1, 1)));
    }

    #[test]
    fn empty_weights_pass() {
        let w = WeightedHypergraph::new(8, 3, Mode::Linear).unwrap();
        let report = weighted_box_bound_check(&w, &rat(1, 1), &rat(2, 1)).unwrap();
        assert!(report.passed());
        assert_eq!(report.boxes_checked, 0);
    }

    #[test]
    fn measured_constant_is_tight() {
        let w = pow2_family(64, 3).unwrap().to_weighted();
        let c = rat(2, 1);
        let report = weighted_box_bound_check(&w, &rat(1, 1), &c).unwrap();
        let a = report.measured_a.clone().unwrap();
        assert!(!report.hypothesis_holds);
        assert!(weighted_box_bound_check(&w, &a, &c).unwrap().passed());
        let below = &a - rat(1, 1000);
        assert!(!weighted_box_bound_check(&w, &below, &c).unwrap().hypothesis_holds);
    }

    #[test]
    fn fractional_exponent() {
        let w = Hypergraph::complete(8, 2, Mode::Linear).unwrap().to_weighted();
        assert!(!weighted_box_bound_check(&w, &rat(1, 1), &rat(3, 2)).unwrap().hypothesis_holds);
        let report = weighted_box_bound_check(&w, &rat(2, 1), &rat(3, 2)).unwrap();
        assert!(report.passed());
        assert_eq!(report.measured_a, None);
        assert!(weighted_box_bound_check(&w, &rat(1, 1), &rat(5, 2)).is_err());
    }
}
