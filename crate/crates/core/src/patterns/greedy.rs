//! Constructive crossing-path finder based on iterated edge marking.
//!
//! Going down from level `k` to level 2, each level marks, for every
//! (r-1)-set `f` of the shadow, a single edge `f + w` with `w` extremal in the
//! part the next path vertex must come from, and removes the marked edges.
//! Any edge left at level 1 starts a path; level `t` then extends the path by
//! the vertex it marked for the last `r-1` path vertices. Each level removes
//! at most one edge per shadow set, which is what makes the edge-count bounds
//! sufficient.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::intervals::{check_interval_coloring, check_split_certificate, Interval, SplitCertificate};
use super::{crossing_path_positions, validate_embedding, Pattern};
use crate::error::{invalid, Result};
use crate::hypergraph::{without, Edge, Embedding, Hypergraph, Mode};

/// The part structure the finder works against.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HostParts {
    /// Interval r-coloring `X_1 < .. < X_r` of a linear host.
    Coloring(Vec<Interval>),
    /// Split partition of a cyclic host.
    Split(SplitCertificate),
}

/// `k * sum_i prod_{j != i} n_j`, the edge count above which a partite host
/// with part sizes `sizes` must contain `CP_k^r`.
pub fn partite_path_bound(sizes: &[usize], k: usize) -> BigUint {
    let sum = (0..sizes.len()).fold(BigUint::zero(), |acc, i| {
        acc + sizes.iter().enumerate().filter(|&(j, _)| j != i).fold(BigUint::one(), |p, (_, &s)| p * s)
    });
    sum * k
}

/// Which part a new vertex comes from, and how "extremal" is chosen there.
#[derive(Clone, Copy)]
enum Target {
    /// Largest vertex of part `p` (by offset from the part start).
    Largest(usize),
    /// Largest vertex of the doubled part strictly before the set's own
    /// doubled-part vertex.
    LargestBelowOwn(usize),
}

struct Layout {
    n: usize,
    parts: Vec<Interval>,
    /// part index for each path residue `0..r`
    residue_part: Vec<usize>,
    /// the doubled part, when the host is split
    doubled: Option<usize>,
}

impl Layout {
    fn part_of(&self, x: usize) -> usize {
        self.parts.iter().position(|p| p.contains(x, self.n)).expect("parts cover the vertex range")
    }

    fn offset(&self, x: usize) -> usize {
        self.parts[self.part_of(x)].offset(x, self.n)
    }

    /// Rule for adding path vertex `j`.
    fn target(&self, j: usize, r: usize) -> Target {
        let part = self.residue_part[j % r];
        match self.doubled {
            // first vertex of the second chain inside the doubled part
            Some(d) if part == d && j % r == r - 2 => Target::LargestBelowOwn(d),
            _ => Target::Largest(part),
        }
    }
}

/// Looks for a crossing k-path by the marking argument.
///
/// In linear mode `parts` must be an interval r-coloring of `h`; a path is
/// guaranteed once `e(h)` exceeds [`partite_path_bound`]. In cyclic mode
/// `parts` must be a split certificate of `h` and `k <= 2r - 1`; a path is
/// guaranteed once `e(h) > k * v(h)^(r-1)`. Below those bounds the finder may
/// return `None` even if a path exists. Returned paths list `v_0 .. v_{k+r-2}`
/// and have been checked against `CP_k^r` with the embedding validator.
pub fn greedy_crossing_path(h: &Hypergraph, parts: &HostParts, k: usize) -> Result<Option<Vec<usize>>> {
    let r = h.r();
    if k == 0 {
        return Err(invalid("path length must be at least 1"));
    }
    let layout = match (h.mode(), parts) {
        (Mode::Linear, HostParts::Coloring(p)) => {
            check_interval_coloring(h, p).map_err(|e| invalid(format!("invalid interval coloring: {e}")))?;
            Layout { n: h.n(), parts: p.clone(), residue_part: (0..r).collect(), doubled: None }
        }
        (Mode::Cyclic, HostParts::Split(cert)) => {
            check_split_certificate(h, cert).map_err(|e| invalid(format!("invalid split partition: {e}")))?;
            if k > 2 * r - 1 {
                return Err(invalid(format!("split hosts only support k <= 2r - 1 = {}", 2 * r - 1)));
            }
            // residues 0..r-2 walk the single parts starting after the
            // doubled one; residues r-2 and r-1 both live in the doubled part
            let d = cert.doubled - 1;
            let m = r - 1;
            let mut residue_part: Vec<usize> = (0..r - 2).map(|i| (d + 1 + i) % m).collect();
            residue_part.push(d);
            residue_part.push(d);
            Layout { n: h.n(), parts: cert.parts.clone(), residue_part, doubled: Some(d) }
        }
        (Mode::Linear, HostParts::Split(_)) => {
            return Err(invalid("linear hosts need an interval r-coloring"));
        }
        (Mode::Cyclic, HostParts::Coloring(_)) => {
            return Err(invalid("cyclic hosts need a split partition"));
        }
    };

    // marks[t] for levels t = 2..=k, built from the top level down
    let mut current: BTreeSet<Edge> = h.edges().iter().cloned().collect();
    let mut marks: Vec<BTreeMap<Edge, usize>> = vec![BTreeMap::new(); k + 1];
    for t in (2..=k).rev() {
        let new_index = t + r - 2;
        let marked = mark_level(&current, &layout, layout.target(new_index, r), layout.doubled.is_none());
        for (f, w) in &marked {
            let mut e = f.clone();
            e.push(*w);
            e.sort_unstable();
            current.remove(&e);
        }
        marks[t] = marked;
    }
    let Some(first) = current.iter().next() else {
        return Ok(None);
    };

    let mut path = order_first_edge(first, &layout, r);
    for (t, level) in marks.iter().enumerate().skip(2) {
        let mut tail: Edge = path[path.len() - (r - 1)..].to_vec();
        tail.sort_unstable();
        match level.get(&tail) {
            Some(&w) => path.push(w),
            None => return Ok(None),
        }
        debug_assert_eq!(path.len(), t + r - 1);
    }

    let pattern = Pattern::crossing_path(r, k)?.with_mode(h.mode());
    let emb = path_embedding(&path, r, k, h.mode());
    if validate_embedding(h, &pattern, &emb).is_err() {
        return Ok(None);
    }
    Ok(Some(path))
}

/// Marks one edge per shadow set. In linear (partite) mode every shadow set is
/// marked with its largest completion, as in the plain counting argument; in
/// split mode only sets missing the target part are marked.
fn mark_level(edges: &BTreeSet<Edge>, layout: &Layout, target: Target, mark_all: bool) -> BTreeMap<Edge, usize> {
    let mut marked: BTreeMap<Edge, (usize, usize)> = BTreeMap::new();
    for e in edges {
        for skip in 0..e.len() {
            let w = e[skip];
            let f = without(e, skip);
            let part_w = layout.part_of(w);
            let eligible = match target {
                Target::Largest(p) => mark_all || (part_w == p && f.iter().all(|&x| layout.part_of(x) != p)),
                Target::LargestBelowOwn(d) => {
                    let own: Vec<usize> = f.iter().copied().filter(|&x| layout.part_of(x) == d).collect();
                    part_w == d && own.len() == 1 && layout.offset(w) < layout.offset(own[0])
                }
            };
            if !eligible {
                continue;
            }
            let key = if mark_all { w } else { layout.offset(w) };
            let slot = marked.entry(f).or_insert((key, w));
            if key > slot.0 {
                *slot = (key, w);
            }
        }
    }
    marked.into_iter().map(|(f, (_, w))| (f, w)).collect()
}

/// Lists a starting edge as `v_0 .. v_{r-1}` according to the part layout.
fn order_first_edge(e: &[usize], layout: &Layout, r: usize) -> Vec<usize> {
    let mut by_part: Vec<Vec<usize>> = vec![Vec::new(); layout.parts.len()];
    for &x in e {
        by_part[layout.part_of(x)].push(x);
    }
    for bucket in &mut by_part {
        bucket.sort_by_key(|&x| layout.offset(x));
    }
    let mut used = vec![0usize; layout.parts.len()];
    (0..r)
        .map(|j| {
            let p = layout.residue_part[j];
            let x = by_part[p][used[p]];
            used[p] += 1;
            x
        })
        .collect()
}

fn path_embedding(path: &[usize], r: usize, k: usize, mode: Mode) -> Embedding {
    let pos = crossing_path_positions(r, k);
    let mut map = vec![0; path.len()];
    for (j, &x) in path.iter().enumerate() {
        map[pos[j]] = x;
    }
    let rotation = match mode {
        Mode::Linear => 0,
        Mode::Cyclic => (0..map.len()).min_by_key(|&q| map[q]).unwrap_or(0),
    };
    Embedding { map, rotation }
}
