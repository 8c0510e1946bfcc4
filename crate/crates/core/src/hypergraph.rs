//! Ordered and cyclically ordered uniform hypergraphs, plus their weighted
//! counterparts.
//!
//! Vertices are `0..n`. In [`Mode::Cyclic`] the orientation is increasing
//! index modulo `n`. Edges are always stored as strictly increasing tuples,
//! sorted lexicographically and deduplicated, so two hypergraphs with the same
//! edge set compare equal.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// An r-set of vertices stored as a strictly increasing tuple.
pub type Edge = Vec<usize>;

/// How the vertex set is ordered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Linear,
    Cyclic,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Linear => "linear",
            Mode::Cyclic => "cyclic",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Mode::Linear),
            "cyclic" => Ok(Mode::Cyclic),
            other => Err(invalid(format!("unknown mode `{other}` (expected linear or cyclic)"))),
        }
    }
}

pub(crate) fn canonical_edge(n: usize, r: usize, edge: &[usize]) -> Result<Edge> {
    let mut e = edge.to_vec();
    e.sort_unstable();
    if e.len() != r {
        return Err(Error::InvalidEdge { edge: edge.to_vec(), reason: format!("expected {r} vertices") });
    }
    if e.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidEdge { edge: edge.to_vec(), reason: "repeated vertex".into() });
    }
    if let Some(&last) = e.last() {
        if last >= n {
            return Err(Error::InvalidEdge { edge: edge.to_vec(), reason: format!("vertex out of range 0..{n}") });
        }
    }
    Ok(e)
}

/// An r-uniform hypergraph on `0..n` with a linear or cyclic vertex order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hypergraph {
    n: usize,
    r: usize,
    mode: Mode,
    edges: Vec<Edge>,
}

impl Hypergraph {
    /// Builds a hypergraph, canonicalizing every edge. Duplicate edges are merged.
    pub fn new<I, E>(n: usize, r: usize, mode: Mode, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: AsRef<[usize]>,
    {
        if r == 0 {
            return Err(invalid("uniformity must be positive"));
        }
        let mut out = edges.into_iter().map(|e| canonical_edge(n, r, e.as_ref())).collect::<Result<Vec<_>>>()?;
        out.sort_unstable();
        out.dedup();
        Ok(Hypergraph { n, r, mode, edges: out })
    }

    /// Builds from edges already known to be canonical and sorted.
    pub(crate) fn from_sorted_unchecked(n: usize, r: usize, mode: Mode, edges: Vec<Edge>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        Hypergraph { n, r, mode, edges }
    }

    pub fn empty(n: usize, r: usize, mode: Mode) -> Self {
        Hypergraph { n, r, mode, edges: Vec::new() }
    }

    /// All `C(n, r)` r-subsets of `0..n`.
    pub fn complete(n: usize, r: usize, mode: Mode) -> Result<Self> {
        if r < 2 {
            return Err(invalid(format!("uniformity must be at least 2, got {r}")));
        }
        if n < r {
            return Err(invalid(format!("need n >= r, got n = {n}, r = {r}")));
        }
        let edges = (0..n).combinations(r).collect();
        Ok(Hypergraph { n, r, mode, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains_edge(&self, edge: &[usize]) -> bool {
        self.edges.binary_search_by(|e| e.as_slice().cmp(edge)).is_ok()
    }

    /// The same edge set read with another vertex ordering.
    pub fn with_mode(&self, mode: Mode) -> Self {
        Hypergraph { mode, ..self.clone() }
    }

    /// Vertices lying in at least one edge, increasing.
    pub fn covered_vertices(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.edges.iter().flatten().copied().collect();
        set.into_iter().collect()
    }

    /// `v(H)`: the number of covered vertices.
    pub fn vertex_count(&self) -> usize {
        self.covered_vertices().len()
    }

    /// `e(H) / v(H)^(r-1)` as an exact rational.
    pub fn codegree_density(&self) -> Result<BigRational> {
        if self.edges.is_empty() {
            return Err(Error::EmptyHypergraph);
        }
        let v = BigInt::from(self.vertex_count());
        Ok(BigRational::new(BigInt::from(self.edges.len()), Pow::pow(v, (self.r - 1) as u32)))
    }

    /// The (r-1)-shadow: every (r-1)-subset of an edge.
    pub fn shadow(&self) -> Result<Hypergraph> {
        if self.r < 2 {
            return Err(invalid("shadow needs uniformity at least 2"));
        }
        let set: BTreeSet<Edge> =
            self.edges.iter().flat_map(|e| (0..e.len()).map(move |skip| without(e, skip))).collect();
        Ok(Hypergraph { n: self.n, r: self.r - 1, mode: self.mode, edges: set.into_iter().collect() })
    }

    /// Induced subhypergraph on `keep`, relabeled `0..|keep|` in the order of
    /// `keep` (which is the linear, and hence also cyclic, order of the host).
    pub fn restrict(&self, keep: &[usize]) -> Result<Hypergraph> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if let Some(&v) = keep.iter().find(|&&v| v >= self.n) {
            return Err(invalid(format!("vertex {v} is outside 0..{}", self.n)));
        }
        let mut relabel = vec![usize::MAX; self.n];
        for (i, &v) in keep.iter().enumerate() {
            relabel[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| e.iter().all(|&v| relabel[v] != usize::MAX))
            .map(|e| e.iter().map(|&v| relabel[v]).collect())
            .collect();
        // relabeling is monotone, so lexicographic order survives
        Ok(Hypergraph { n: keep.len(), r: self.r, mode: self.mode, edges })
    }

    /// The all-ones weighting of this hypergraph.
    pub fn to_weighted(&self) -> WeightedHypergraph {
        WeightedHypergraph {
            n: self.n,
            r: self.r,
            mode: self.mode,
            weights: self.edges.iter().map(|e| (e.clone(), BigRational::one())).collect(),
        }
    }
}

pub(crate) fn without(edge: &[usize], skip: usize) -> Edge {
    edge.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect()
}

/// A nonnegative rational weighting of r-sets. Only positive weights are stored;
/// absent r-sets have weight zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedHypergraph {
    n: usize,
    r: usize,
    mode: Mode,
    weights: BTreeMap<Edge, BigRational>,
}

impl WeightedHypergraph {
    pub fn new(n: usize, r: usize, mode: Mode) -> Result<Self> {
        if r == 0 {
            return Err(invalid("uniformity must be positive"));
        }
        Ok(WeightedHypergraph { n, r, mode, weights: BTreeMap::new() })
    }

    pub fn from_weights<I>(n: usize, r: usize, mode: Mode, items: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Edge, BigRational)>,
    {
        let mut w = Self::new(n, r, mode)?;
        for (e, x) in items {
            w.add(&e, x)?;
        }
        Ok(w)
    }

    /// Sets the weight of an r-set (zero removes it).
    pub fn set(&mut self, edge: &[usize], weight: BigRational) -> Result<()> {
        if weight.is_negative() {
            return Err(invalid(format!("negative weight {weight} on {edge:?}")));
        }
        let e = canonical_edge(self.n, self.r, edge)?;
        if weight.is_zero() {
            self.weights.remove(&e);
        } else {
            self.weights.insert(e, weight);
        }
        Ok(())
    }

    /// Adds to the weight of an r-set.
    pub fn add(&mut self, edge: &[usize], weight: BigRational) -> Result<()> {
        if weight.is_negative() {
            return Err(invalid(format!("negative weight {weight} on {edge:?}")));
        }
        if weight.is_zero() {
            return Ok(());
        }
        let e = canonical_edge(self.n, self.r, edge)?;
        *self.weights.entry(e).or_insert_with(BigRational::zero) += weight;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn weight(&self, edge: &[usize]) -> BigRational {
        self.weights.get(edge).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Positive-weight r-sets with their weights, in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (&Edge, &BigRational)> {
        self.weights.iter()
    }

    pub fn support_size(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `|w|`: total weight.
    pub fn total(&self) -> BigRational {
        self.weights.values().fold(BigRational::zero(), |acc, w| acc + w)
    }

    pub fn covered_vertices(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.weights.keys().flatten().copied().collect();
        set.into_iter().collect()
    }

    /// `v(w)`: number of vertices covered by the support.
    pub fn vertex_count(&self) -> usize {
        self.covered_vertices().len()
    }

    /// `H(w)`: the support as a hypergraph.
    pub fn support(&self) -> Hypergraph {
        Hypergraph { n: self.n, r: self.r, mode: self.mode, edges: self.weights.keys().cloned().collect() }
    }

    /// `|w| / v(w)^(r-1)`.
    pub fn codegree_density(&self) -> Result<BigRational> {
        if self.weights.is_empty() {
            return Err(Error::EmptyHypergraph);
        }
        let v = BigInt::from(self.vertex_count());
        Ok(self.total() / BigRational::from_integer(Pow::pow(v, (self.r - 1) as u32)))
    }

    /// Restriction to the r-sets accepted by `keep`.
    pub fn filter<F>(&self, mut keep: F) -> WeightedHypergraph
    where
        F: FnMut(&[usize]) -> bool,
    {
        WeightedHypergraph {
            n: self.n,
            r: self.r,
            mode: self.mode,
            weights: self.weights.iter().filter(|(e, _)| keep(e)).map(|(e, w)| (e.clone(), w.clone())).collect(),
        }
    }

    /// Restriction `w_G` to the edges of `g`.
    pub fn restrict_to(&self, g: &Hypergraph) -> WeightedHypergraph {
        self.filter(|e| g.contains_edge(e))
    }

    pub fn with_mode(&self, mode: Mode) -> Self {
        WeightedHypergraph { mode, ..self.clone() }
    }
}

/// Witness of a pattern occurrence: `map[q]` is the host vertex of pattern
/// position `q`. In cyclic mode, `rotation` is the pattern position whose
/// image is smallest, so reading positions from `rotation` onwards (wrapping)
/// gives strictly increasing host vertices. Always 0 in linear mode.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Embedding {
    pub map: Vec<usize>,
    pub rotation: usize,
}

impl Embedding {
    /// Images in reading order starting from `rotation`.
    pub fn reading(&self) -> Vec<usize> {
        let v = self.map.len();
        (0..v).map(|i| self.map[(self.rotation + i) % v]).collect()
    }
}
