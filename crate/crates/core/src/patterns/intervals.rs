use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::hypergraph::{Hypergraph, Mode};

/// A run of `len` consecutive vertices starting at `start`. In cyclic mode the
/// run may wrap past `n - 1` back to 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub start: usize,
    pub len: usize,
}

impl Interval {
    pub fn new(start: usize, len: usize) -> Self {
        Interval { start, len }
    }

    /// Membership for an interval of a cyclically ordered `0..n`.
    pub fn contains(&self, x: usize, n: usize) -> bool {
        (x + n - self.start) % n < self.len
    }

    /// Offset of `x` from the start, clockwise.
    pub fn offset(&self, x: usize, n: usize) -> usize {
        (x + n - self.start) % n
    }

    pub fn vertices(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).map(move |i| (self.start + i) % n)
    }

    pub fn wraps(&self, n: usize) -> bool {
        self.start + self.len > n
    }
}

/// Intervals from consecutive block starts: block `i` runs from `starts[i]`
/// up to (not including) `starts[i + 1]`, the last one wrapping to `starts[0]`.
pub(crate) fn intervals_from_starts(starts: &[usize], n: usize) -> Vec<Interval> {
    let q = starts.len();
    (0..q)
        .map(|i| {
            let len = if q == 1 { n } else { (starts[(i + 1) % q] + n - starts[i]) % n };
            Interval::new(starts[i], len)
        })
        .collect()
}

/// Minimum number of consecutive intervals such that no edge has two
/// vertices in one interval, with a witnessing partition of `0..n`.
///
/// Greedy from the left: the current interval grows until the next vertex
/// shares an edge with a vertex already in it.
pub fn interval_chromatic_number(h: &Hypergraph) -> Result<(usize, Vec<Interval>)> {
    if h.mode() != Mode::Linear {
        return Err(invalid("interval chromatic number is defined for linear order only"));
    }
    let n = h.n();
    if n == 0 {
        return Ok((0, Vec::new()));
    }
    // latest[x]: the largest vertex below x that shares an edge with x
    let mut latest: Vec<Option<usize>> = vec![None; n];
    for e in h.edges() {
        for (i, &x) in e.iter().enumerate().skip(1) {
            let below = e[i - 1];
            if latest[x].is_none_or(|b| b < below) {
                latest[x] = Some(below);
            }
        }
    }
    let mut starts = vec![0];
    for (x, prev) in latest.iter().enumerate().take(n).skip(1) {
        let cur = *starts.last().expect("nonempty");
        if prev.is_some_and(|b| b >= cur) {
            starts.push(x);
        }
    }
    let mut parts = intervals_from_starts(&starts, n);
    // the last interval must not wrap in linear mode
    let last = parts.len() - 1;
    parts[last].len = n - parts[last].start;
    Ok((parts.len(), parts))
}

/// Checks that `parts` is an interval r-coloring of `h`: consecutive
/// nonempty linear intervals covering `0..n`, each edge meeting each part once.
pub fn check_interval_coloring(h: &Hypergraph, parts: &[Interval]) -> std::result::Result<(), String> {
    let n = h.n();
    check_consecutive(parts, n, Mode::Linear)?;
    if parts.len() != h.r() {
        return Err(format!("{} parts for a {}-uniform host", parts.len(), h.r()));
    }
    for e in h.edges() {
        for part in parts {
            let c = e.iter().filter(|&&x| part.contains(x, n)).count();
            if c != 1 {
                return Err(format!("edge {e:?} has {c} vertices in part {part:?}"));
            }
        }
    }
    Ok(())
}

fn check_consecutive(parts: &[Interval], n: usize, mode: Mode) -> std::result::Result<(), String> {
    if parts.is_empty() {
        return Err("no parts".into());
    }
    if parts.iter().any(|p| p.len == 0) {
        return Err("empty part".into());
    }
    if parts.iter().any(|p| p.start >= n) {
        return Err("part starts outside the vertex range".into());
    }
    let total: usize = parts.iter().map(|p| p.len).sum();
    if total != n {
        return Err(format!("parts cover {total} vertices, expected {n}"));
    }
    for (a, b) in parts.iter().circular_tuple_windows() {
        if (a.start + a.len) % n != b.start % n {
            return Err(format!("parts {a:?} and {b:?} are not consecutive"));
        }
    }
    if mode == Mode::Linear && (parts[0].start != 0 || parts.iter().any(|p| p.wraps(n))) {
        return Err("linear parts must start at 0 and not wrap".into());
    }
    Ok(())
}

/// Witness that a hypergraph is split: consecutive intervals
/// `X_1 < .. < X_{r-1}` and a part `X_doubled` (1-based) holding two vertices
/// of every edge while every other part holds exactly one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SplitCertificate {
    pub parts: Vec<Interval>,
    pub doubled: usize,
}

/// Independent validity check of a split certificate against `h`.
pub fn check_split_certificate(h: &Hypergraph, cert: &SplitCertificate) -> std::result::Result<(), String> {
    let n = h.n();
    let r = h.r();
    if r < 3 {
        return Err("split certificates need r >= 3".into());
    }
    if cert.parts.len() != r - 1 {
        return Err(format!("{} parts, expected {}", cert.parts.len(), r - 1));
    }
    if cert.doubled == 0 || cert.doubled > r - 1 {
        return Err(format!("doubled index {} outside 1..={}", cert.doubled, r - 1));
    }
    check_consecutive(&cert.parts, n, h.mode())?;
    for e in h.edges() {
        for (i, part) in cert.parts.iter().enumerate() {
            let want = if i + 1 == cert.doubled { 2 } else { 1 };
            let c = e.iter().filter(|&&x| part.contains(x, n)).count();
            if c != want {
                return Err(format!("edge {e:?} has {c} vertices in X_{}, expected {want}", i + 1));
            }
        }
    }
    Ok(())
}

/// Exhaustive search for a split certificate.
///
/// Blocks are formed from the covered vertices read in order (every rotation
/// of that reading in cyclic mode); uncovered vertices join the block before
/// them. Returns `None` when fewer than `r - 1` vertices are covered.
pub fn find_split_certificate(h: &Hypergraph) -> Result<Option<SplitCertificate>> {
    let r = h.r();
    if r < 3 {
        return Err(invalid(format!("split certificates need r >= 3, got {r}")));
    }
    let n = h.n();
    let covered = h.covered_vertices();
    let v = covered.len();
    if v < r - 1 {
        return Ok(None);
    }
    let mut index = vec![usize::MAX; n];
    for (i, &x) in covered.iter().enumerate() {
        index[x] = i;
    }
    let rotations = match h.mode() {
        Mode::Linear => 1,
        Mode::Cyclic => v,
    };
    let parts_needed = r - 1;
    for rot in 0..rotations {
        // reading positions of each edge's vertices
        let edges: Vec<Vec<usize>> =
            h.edges().iter().map(|e| e.iter().map(|&x| (index[x] + v - rot) % v).collect()).collect();
        for cuts in (1..v).combinations(parts_needed - 1) {
            let block_of = |p: usize| cuts.partition_point(|&c| c <= p);
            for doubled in 0..parts_needed {
                let ok = edges.iter().all(|e| {
                    let mut counts = vec![0usize; parts_needed];
                    for &p in e {
                        counts[block_of(p)] += 1;
                    }
                    counts.iter().enumerate().all(|(i, &c)| c == if i == doubled { 2 } else { 1 })
                });
                if ok {
                    let mut starts: Vec<usize> =
                        std::iter::once(0).chain(cuts.iter().copied()).map(|p| covered[(p + rot) % v]).collect();
                    if h.mode() == Mode::Linear {
                        starts[0] = 0;
                    }
                    let mut parts = intervals_from_starts(&starts, n);
                    if h.mode() == Mode::Linear {
                        let last = parts.len() - 1;
                        parts[last].len = n - parts[last].start;
                    }
                    let cert = SplitCertificate { parts, doubled: doubled + 1 };
                    debug_assert_eq!(check_split_certificate(h, &cert), Ok(()));
                    return Ok(Some(cert));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lin(n: usize, r: usize, edges: &[&[usize]]) -> Hypergraph {
        Hypergraph::new(n, r, Mode::Linear, edges.iter().copied()).unwrap()
    }

    /// Every partition of 0..n into consecutive intervals, smallest count first.
    fn brute_interval_chromatic(h: &Hypergraph) -> usize {
        let n = h.n();
        (1..=n)
            .find(|&k| {
                (1..n).combinations(k - 1).any(|cuts| {
                    let block = |x: usize| cuts.partition_point(|&c| c <= x);
                    h.edges().iter().all(|e| e.iter().map(|&x| block(x)).all_unique())
                })
            })
            .unwrap_or(0)
    }

    #[test]
    fn chromatic_examples() {
        let h = lin(3, 2, &[&[0, 1], &[1, 2]]);
        let (k, parts) = interval_chromatic_number(&h).unwrap();
        assert_eq!(k, 3);
        assert_eq!(parts, vec![Interval::new(0, 1), Interval::new(1, 1), Interval::new(2, 1)]);
        assert_eq!(brute_interval_chromatic(&h), 3);

        let h = lin(4, 2, &[&[0, 2], &[1, 3]]);
        let (k, parts) = interval_chromatic_number(&h).unwrap();
        assert_eq!(k, 2);
        assert_eq!(parts, vec![Interval::new(0, 2), Interval::new(2, 2)]);

        for r in 2..6 {
            let h = Hypergraph::new(r, r, Mode::Linear, [(0..r).collect::<Vec<_>>()]).unwrap();
            assert_eq!(interval_chromatic_number(&h).unwrap().0, r);
        }
        assert!(interval_chromatic_number(&h.with_mode(Mode::Cyclic)).is_err());
    }

    #[test]
    fn greedy_matches_bruteforce_exhaustively_for_small_graphs() {
        // every 2-graph on up to 6 vertices
        for n in 1..=6usize {
            let pairs: Vec<Vec<usize>> = (0..n).combinations(2).collect();
            for mask in 0u32..(1 << pairs.len()) {
                let edges = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, e)| e.clone());
                let h = Hypergraph::new(n, 2, Mode::Linear, edges).unwrap();
                let (k, parts) = interval_chromatic_number(&h).unwrap();
                assert_eq!(k, brute_interval_chromatic(&h), "{h:?}");
                assert_eq!(parts.iter().map(|p| p.len).sum::<usize>(), n);
            }
        }
    }

    #[test]
    fn split_certificate_examples() {
        let h = lin(4, 3, &[&[0, 1, 2], &[0, 1, 3]]);
        let cert = find_split_certificate(&h).unwrap().unwrap();
        assert_eq!(cert.parts, vec![Interval::new(0, 1), Interval::new(1, 3)]);
        assert_eq!(cert.doubled, 2);

        let h = lin(3, 3, &[&[0, 1, 2]]);
        let cert = find_split_certificate(&h).unwrap().unwrap();
        check_split_certificate(&h, &cert).unwrap();

        let h = lin(5, 3, &[&[0, 1, 2], &[2, 3, 4]]);
        assert_eq!(find_split_certificate(&h).unwrap(), None);
        // read cyclically the same edges split as {4,0} | {1,2,3}
        let cert = find_split_certificate(&h.with_mode(Mode::Cyclic)).unwrap().unwrap();
        check_split_certificate(&h.with_mode(Mode::Cyclic), &cert).unwrap();

        assert!(find_split_certificate(&lin(4, 2, &[&[0, 1]])).is_err());
        assert_eq!(find_split_certificate(&Hypergraph::empty(5, 3, Mode::Linear)).unwrap(), None);
    }

    #[test]
    fn interval_chromatic_r_graphs_are_split() {
        let h = lin(6, 3, &[&[0, 2, 4], &[1, 3, 5], &[0, 3, 4]]);
        assert_eq!(interval_chromatic_number(&h).unwrap().0, 3);
        let cert = find_split_certificate(&h).unwrap().unwrap();
        check_split_certificate(&h, &cert).unwrap();
    }

    #[test]
    fn checker_rejects_bad_certificates() {
        let h = lin(4, 3, &[&[0, 1, 2], &[0, 1, 3]]);
        let good = SplitCertificate { parts: vec![Interval::new(0, 2), Interval::new(2, 2)], doubled: 1 };
        assert_eq!(check_split_certificate(&h, &good), Ok(()));
        let wrong_doubled = SplitCertificate { doubled: 2, ..good.clone() };
        assert!(check_split_certificate(&h, &wrong_doubled).is_err());
        let gap = SplitCertificate { parts: vec![Interval::new(0, 2), Interval::new(3, 1)], doubled: 1 };
        assert!(check_split_certificate(&h, &gap).is_err());
        let wrapping = SplitCertificate { parts: vec![Interval::new(3, 3), Interval::new(2, 1)], doubled: 1 };
        assert!(check_split_certificate(&h, &wrapping).is_err());
        assert!(check_split_certificate(&h.with_mode(Mode::Cyclic), &wrapping).is_err());
    }

    #[test]
    fn coloring_check() {
        let h = lin(4, 2, &[&[0, 2], &[1, 3]]);
        assert!(check_interval_coloring(&h, &[Interval::new(0, 2), Interval::new(2, 2)]).is_ok());
        assert!(check_interval_coloring(&h, &[Interval::new(0, 1), Interval::new(1, 3)]).is_err());
    }
}
