use std::sync::atomic::{AtomicU64, Ordering};

use itertools::Itertools;
use serde::Serialize;

use crate::combinatorics::{binomial_u128, colex_cmp};
use crate::constructions::{consecutive_family, pow2_family};
use crate::error::{invalid, Error, Result};
use crate::hypergraph::{Edge, Hypergraph, Mode};
use crate::par;
use crate::patterns::{contains, Pattern};

/// Default cap on the number of candidate edges.
pub const DEFAULT_GUARD: u128 = 70;
/// Edge sets are bitmasks, so no universe can exceed this.
pub const MAX_UNIVERSE: usize = 128;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    /// Largest edge universe the solver accepts (capped at [`MAX_UNIVERSE`]).
    pub guard: u128,
    /// Start from the best pattern-free construction for built-in patterns.
    pub seed_construction: bool,
    /// Stop after this many search nodes; the result is then not proved.
    pub node_limit: Option<u64>,
    /// Number of leading branching decisions expanded into parallel subtrees.
    pub split_depth: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { guard: DEFAULT_GUARD, seed_construction: false, node_limit: None, split_depth: 6 }
    }
}

/// Result of an exact maximization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtremalResult {
    pub value: usize,
    #[serde(skip)]
    pub witness: Hypergraph,
    pub proved_optimal: bool,
    pub nodes_explored: u64,
    /// Candidate edges.
    pub universe: usize,
    /// Distinct edge sets of pattern copies inside the universe.
    pub copies: usize,
    /// Edge count of the construction used as the starting incumbent.
    pub seed_value: Option<usize>,
}

/// The candidate edges and the pattern copies they contain.
struct Problem {
    edges: Vec<Edge>,
    copies: Vec<u128>,
    by_edge: Vec<Vec<u128>>,
    /// Conflict graph when every copy has exactly two edges.
    conflicts: Option<Vec<u128>>,
}

fn bit(i: usize) -> u128 {
    1u128 << i
}

fn full_mask(m: usize) -> u128 {
    if m == 128 {
        u128::MAX
    } else {
        bit(m) - 1
    }
}

impl Problem {
    fn build(edges: Vec<Edge>, n: usize, pattern: &Pattern, admissible: impl Fn(&[usize]) -> bool + Sync) -> Self {
        let m = edges.len();
        let index = |e: &[usize]| edges.binary_search_by(|f| colex_cmp(f, e)).ok();
        let v = pattern.vertex_count();
        let rotations: Vec<usize> = match pattern.mode() {
            Mode::Linear => vec![0],
            Mode::Cyclic => (0..v).collect(),
        };
        let rotated: Vec<Vec<Edge>> = rotations.iter().map(|&rho| pattern.rotated_edges(rho)).collect();
        let subsets: Vec<Vec<usize>> = if v <= n { (0..n).combinations(v).collect() } else { Vec::new() };
        let per_subset = par::map(subsets, |s| {
            let mut found = Vec::new();
            'rot: for edges_rho in &rotated {
                let mut mask = 0u128;
                for pe in edges_rho {
                    let img: Edge = pe.iter().map(|&q| s[q]).collect();
                    if !admissible(&img) {
                        continue 'rot;
                    }
                    match index(&img) {
                        Some(i) => mask |= bit(i),
                        None => continue 'rot,
                    }
                }
                found.push(mask);
            }
            found
        });
        let mut copies: Vec<u128> = per_subset.into_iter().flatten().collect();
        copies.sort_unstable();
        copies.dedup();
        // a copy containing another copy adds no constraint
        copies.sort_by_key(|c| c.count_ones());
        let mut minimal: Vec<u128> = Vec::with_capacity(copies.len());
        for c in copies {
            if !minimal.iter().any(|&d| d & !c == 0) {
                minimal.push(c);
            }
        }
        let mut by_edge = vec![Vec::new(); m];
        for &c in &minimal {
            let mut rest = c;
            while rest != 0 {
                let i = rest.trailing_zeros() as usize;
                by_edge[i].push(c);
                rest &= rest - 1;
            }
        }
        let conflicts = if minimal.iter().all(|c| c.count_ones() == 2) {
            let mut adj = vec![0u128; m];
            for &c in &minimal {
                let a = c.trailing_zeros() as usize;
                let b = 127 - c.leading_zeros() as usize;
                adj[a] |= bit(b);
                adj[b] |= bit(a);
            }
            Some(adj)
        } else {
            None
        };
        Problem { edges, copies: minimal, by_edge, conflicts }
    }

    fn m(&self) -> usize {
        self.edges.len()
    }
}

struct Outcome {
    best: i64,
    mask: u128,
    nodes: u64,
    aborted: bool,
}

struct Engine<'a> {
    p: &'a Problem,
    best: i64,
    mask: u128,
    nodes: u64,
    limit: u64,
    aborted: bool,
    shared: &'a AtomicU64,
    subtree: usize,
}

impl Engine<'_> {
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.limit {
            self.aborted = true;
        }
        self.aborted
    }

    fn pruned(&self, bound: usize) -> bool {
        let bound = bound as i64;
        bound <= self.best || incumbent_key(bound, self.subtree) < self.shared.load(Ordering::Relaxed)
    }

    fn record(&mut self, count: usize, mask: u128) {
        if count as i64 > self.best {
            self.best = count as i64;
            self.mask = mask;
            self.shared.fetch_max(incumbent_key(self.best, self.subtree), Ordering::Relaxed);
        }
    }

    /// Lower bound on how many undecided edges must still be dropped: alive
    /// copies with pairwise disjoint undecided parts, smallest parts first.
    fn packing(&self, excluded: u128, undecided: u128) -> usize {
        let mut used = 0u128;
        let mut count = 0;
        let mut size = 1;
        let mut remaining = true;
        while remaining {
            remaining = false;
            for &c in &self.p.copies {
                if c & excluded != 0 {
                    continue;
                }
                let part = c & undecided;
                let s = part.count_ones();
                if s > size {
                    remaining = true;
                } else if s == size && part & used == 0 {
                    used |= part;
                    count += 1;
                }
            }
            size += 1;
        }
        count
    }

    fn can_include(&self, pos: usize, included: u128) -> bool {
        let inc = included | bit(pos);
        self.p.by_edge[pos].iter().all(|&c| c & !inc != 0)
    }

    fn hitting(&mut self, pos: usize, included: u128, excluded: u128, count: usize) {
        if self.tick() {
            return;
        }
        let m = self.p.m();
        if pos == m {
            self.record(count, included);
            return;
        }
        let undecided = full_mask(m) & !full_mask(pos);
        let bound = count + undecided.count_ones() as usize - self.packing(excluded, undecided);
        if self.pruned(bound) {
            return;
        }
        if self.can_include(pos, included) {
            self.hitting(pos + 1, included | bit(pos), excluded, count + 1);
        }
        self.hitting(pos + 1, included, excluded | bit(pos), count);
    }

    /// Upper bound on an independent set inside `cand`: greedy clique cover.
    fn clique_cover(&self, cand: u128) -> usize {
        let adj = self.p.conflicts.as_ref().expect("conflict graph");
        let mut rest = cand;
        let mut cliques = 0;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= !bit(v);
            let mut grow = rest & adj[v];
            while grow != 0 {
                let u = grow.trailing_zeros() as usize;
                rest &= !bit(u);
                grow &= adj[u] & !bit(u);
            }
            cliques += 1;
        }
        cliques
    }

    fn independent(&mut self, cand: u128, included: u128, count: usize) {
        if self.tick() {
            return;
        }
        if cand == 0 {
            self.record(count, included);
            return;
        }
        if self.pruned(count + self.clique_cover(cand)) {
            return;
        }
        let adj = self.p.conflicts.as_ref().expect("conflict graph");
        let v = cand.trailing_zeros() as usize;
        self.independent(cand & !bit(v) & !adj[v], included | bit(v), count + 1);
        self.independent(cand & !bit(v), included, count);
    }
}

/// A partially decided search state at the split depth.
#[derive(Clone, Copy)]
enum Start {
    Hitting { pos: usize, included: u128, excluded: u128, count: usize },
    Independent { cand: u128, included: u128, count: usize },
}

fn expand(p: &Problem, depth: usize) -> Vec<Start> {
    let m = p.m();
    let mut frontier = vec![match &p.conflicts {
        Some(_) => Start::Independent { cand: full_mask(m), included: 0, count: 0 },
        None => Start::Hitting { pos: 0, included: 0, excluded: 0, count: 0 },
    }];
    for _ in 0..depth {
        let mut next = Vec::new();
        for s in frontier {
            match s {
                Start::Hitting { pos, included, excluded, count } if pos < m => {
                    let inc = included | bit(pos);
                    if p.by_edge[pos].iter().all(|&c| c & !inc != 0) {
                        next.push(Start::Hitting { pos: pos + 1, included: inc, excluded, count: count + 1 });
                    }
                    next.push(Start::Hitting { pos: pos + 1, included, excluded: excluded | bit(pos), count });
                }
                Start::Independent { cand, included, count } if cand != 0 => {
                    let adj = p.conflicts.as_ref().expect("conflict graph");
                    let v = cand.trailing_zeros() as usize;
                    next.push(Start::Independent {
                        cand: cand & !bit(v) & !adj[v],
                        included: included | bit(v),
                        count: count + 1,
                    });
                    next.push(Start::Independent { cand: cand & !bit(v), included, count });
                }
                done => next.push(done),
            }
        }
        frontier = next;
    }
    frontier
}

/// Runs the search; subtrees share a monotone incumbent, and the join takes
/// the largest value from the earliest subtree, which is what the sequential
/// include-first traversal would have returned first.
/// Orders incumbents by value, then by earlier subtree, so a subtree can
/// also drop branches that only tie a value some earlier subtree reached.
fn incumbent_key(value: i64, subtree: usize) -> u64 {
    (((value + 1) as u64) << 32) | (u32::MAX as u64 - subtree as u64)
}

fn run(p: &Problem, initial: i64, config: &SolverConfig) -> Outcome {
    let shared = AtomicU64::new(incumbent_key(initial, u32::MAX as usize));
    let starts = expand(p, config.split_depth.min(p.m()));
    let subtrees = starts.len() as u64;
    let limit = config.node_limit.unwrap_or(u64::MAX);
    let outcomes = par::map(starts.into_iter().enumerate().collect(), |(subtree, s)| {
        let mut e = Engine { p, best: initial, mask: 0, nodes: 0, limit, aborted: false, shared: &shared, subtree };
        match s {
            Start::Hitting { pos, included, excluded, count } => e.hitting(pos, included, excluded, count),
            Start::Independent { cand, included, count } => e.independent(cand, included, count),
        }
        Outcome { best: e.best, mask: e.mask, nodes: e.nodes, aborted: e.aborted }
    });
    let mut total = Outcome { best: initial, mask: 0, nodes: subtrees, aborted: false };
    for o in outcomes {
        total.nodes += o.nodes;
        total.aborted |= o.aborted;
        if o.best > total.best {
            total.best = o.best;
            total.mask = o.mask;
        }
    }
    total
}

fn check_guard(m: u128, config: &SolverConfig) -> Result<()> {
    let limit = config.guard.min(MAX_UNIVERSE as u128);
    if m > limit {
        return Err(Error::TooLarge { what: "edge universe", size: m, limit });
    }
    Ok(())
}

fn colex_sorted(mut edges: Vec<Edge>) -> Vec<Edge> {
    edges.sort_by(|a, b| colex_cmp(a, b));
    edges
}

/// Best pattern-free construction among the built-in families, validated
/// with the detector.
pub fn construction_seed(n: usize, r: usize, pattern: &Pattern, mode: Mode) -> Option<Hypergraph> {
    let name = pattern.name()?;
    let parts: Vec<&str> = name.split(':').collect();
    let k: usize = parts.get(2)?.parse().ok()?;
    let mut candidates = Vec::new();
    match parts[0] {
        "cp" => {
            candidates.push(consecutive_family(n, r, k.min(r + 1)));
            if k >= r + 2 {
                candidates.push(pow2_family(n, r));
            }
        }
        "cm" => candidates.push(consecutive_family(n, r, r + 1)),
        _ => {}
    }
    let p = pattern.with_mode(mode);
    candidates
        .into_iter()
        .flatten()
        .map(|h| h.with_mode(mode))
        .filter(|h| matches!(contains(h, &p), Ok(None)))
        .max_by_key(|h| h.edge_count())
}

fn finish(
    p: &Problem,
    n: usize,
    r: usize,
    mode: Mode,
    pattern: &Pattern,
    out: Outcome,
    seed: Option<Hypergraph>,
) -> Result<ExtremalResult> {
    let seed_value = seed.as_ref().map(|h| h.edge_count());
    let (value, witness) = if out.best < 0 || (out.aborted && out.mask == 0 && seed.is_some()) {
        match seed {
            Some(h) => (h.edge_count(), h),
            None => (0, Hypergraph::empty(n, r, mode)),
        }
    } else {
        let edges: Vec<&Edge> = (0..p.m()).filter(|&i| out.mask & bit(i) != 0).map(|i| &p.edges[i]).collect();
        (edges.len(), Hypergraph::new(n, r, mode, edges)?)
    };
    debug_assert!(matches!(contains(&witness, pattern), Ok(None)));
    Ok(ExtremalResult {
        value,
        witness,
        proved_optimal: !out.aborted,
        nodes_explored: out.nodes,
        universe: p.m(),
        copies: p.copies.len(),
        seed_value,
    })
}

/// `ex(n, P)` in the given mode: the most edges of an r-graph on `0..n` with
/// no copy of `P`, with the include-first (colex order) earliest optimum as
/// witness.
pub fn max_pattern_free(
    n: usize,
    r: usize,
    pattern: &Pattern,
    mode: Mode,
    config: &SolverConfig,
) -> Result<ExtremalResult> {
    if pattern.r() != r {
        return Err(Error::UniformityMismatch { host: r, pattern: pattern.r() });
    }
    if r < 2 || n < r {
        return Err(invalid(format!("need 2 <= r <= n, got n = {n}, r = {r}")));
    }
    check_guard(binomial_u128(n as u64, r as u64), config)?;
    let pattern = pattern.with_mode(mode);
    let edges = colex_sorted((0..n).combinations(r).collect());
    let problem = Problem::build(edges, n, &pattern, |_| true);
    let seed = if config.seed_construction { construction_seed(n, r, &pattern, mode) } else { None };
    let initial = seed.as_ref().map_or(-1, |h| h.edge_count() as i64 - 1);
    let out = run(&problem, initial, config);
    finish(&problem, n, r, mode, &pattern, out, seed)
}

/// `z(n, P)` over interval-partite hosts: vertices `0..sum(sizes)` cut into
/// consecutive parts of the given sizes, every edge taking one vertex from
/// each part. Linear order.
pub fn z_max_pattern_free(sizes: &[usize], pattern: &Pattern, config: &SolverConfig) -> Result<ExtremalResult> {
    let r = sizes.len();
    if pattern.r() != r {
        return Err(Error::UniformityMismatch { host: r, pattern: pattern.r() });
    }
    if r < 2 || sizes.contains(&0) {
        return Err(invalid("need at least two nonempty parts"));
    }
    let product = sizes.iter().fold(1u128, |acc, &s| acc.saturating_mul(s as u128));
    check_guard(product, config)?;
    let n: usize = sizes.iter().sum();
    let mut part_of = Vec::with_capacity(n);
    for (i, &s) in sizes.iter().enumerate() {
        part_of.extend(std::iter::repeat_n(i, s));
    }
    let edges = colex_sorted(
        sizes
            .iter()
            .scan(0, |start, &s| {
                let range = *start..*start + s;
                *start += s;
                Some(range)
            })
            .multi_cartesian_product()
            .collect(),
    );
    let pattern = pattern.with_mode(Mode::Linear);
    let problem = Problem::build(edges, n, &pattern, |e| e.iter().enumerate().all(|(i, &x)| part_of[x] == i));
    let out = run(&problem, -1, config);
    finish(&problem, n, r, Mode::Linear, &pattern, out, None)
}
