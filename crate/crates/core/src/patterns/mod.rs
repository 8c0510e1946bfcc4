//! Forbidden configurations and the order-preserving containment engine.
//!
//! A [`Pattern`] is a small ordered r-graph whose vertices are its positions
//! `0..v`; the positions themselves are the order. Built-in families are the
//! crossing paths (`cp:<r>:<k>`) and crossing matchings (`cm:<r>:<k>`).

mod detect;
mod greedy;
mod intervals;

pub use detect::{contains, contains_bruteforce, validate_embedding, Detector, DEFAULT_BRUTEFORCE_LIMIT};
pub use greedy::{greedy_crossing_path, partite_path_bound, HostParts};
pub(crate) use intervals::intervals_from_starts;
pub use intervals::{
    check_interval_coloring, check_split_certificate, find_split_certificate, interval_chromatic_number, Interval,
    SplitCertificate,
};

use std::collections::BTreeSet;

use crate::error::{invalid, Error, Result};
use crate::hypergraph::{canonical_edge, Edge, Hypergraph, Mode};

/// An ordered (or cyclically ordered) r-graph on positions `0..v`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pattern {
    v: usize,
    r: usize,
    mode: Mode,
    edges: Vec<Edge>,
    name: Option<String>,
}

impl Pattern {
    /// Builds a pattern; every position must lie in some edge.
    pub fn new<I, E>(v: usize, r: usize, mode: Mode, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: AsRef<[usize]>,
    {
        if r == 0 {
            return Err(invalid("uniformity must be positive"));
        }
        let mut out = edges.into_iter().map(|e| canonical_edge(v, r, e.as_ref())).collect::<Result<Vec<_>>>()?;
        out.sort_unstable();
        out.dedup();
        let covered: BTreeSet<usize> = out.iter().flatten().copied().collect();
        if covered.len() != v {
            return Err(invalid(format!("pattern positions must all be covered: {} of {v} are", covered.len())));
        }
        Ok(Pattern { v, r, mode, edges: out, name: None })
    }

    /// Reads a hypergraph as a pattern on its covered vertices.
    pub fn from_hypergraph(h: &Hypergraph) -> Result<Self> {
        let covered = h.covered_vertices();
        let compact = h.restrict(&covered)?;
        Pattern::new(compact.n(), h.r(), h.mode(), compact.edges())
    }

    /// The crossing k-path `CP_k^r` in linear mode.
    ///
    /// The path `v_0 .. v_{k+r-2}` has edges `{v_i, .., v_{i+r-1}}`. Its vertex
    /// order lists the residue chains `v_j, v_{j+r}, v_{j+2r}, ..` for
    /// `j = 0, 1, .., r-1` one after another, chains truncated at the last
    /// existing index.
    pub fn crossing_path(r: usize, k: usize) -> Result<Self> {
        if r < 2 {
            return Err(invalid(format!("crossing path needs r >= 2, got {r}")));
        }
        if k < 1 {
            return Err(invalid("crossing path needs k >= 1"));
        }
        let pos = crossing_path_positions(r, k);
        let edges: Vec<Edge> = (0..k)
            .map(|i| {
                let mut e: Edge = (i..i + r).map(|j| pos[j]).collect();
                e.sort_unstable();
                e
            })
            .collect();
        let mut p = Pattern::new(k + r - 1, r, Mode::Linear, edges)?;
        p.name = Some(format!("cp:{r}:{k}"));
        Ok(p)
    }

    /// The crossing k-matching `CM_k^r` in linear mode: edges
    /// `{i, i+k, .., i+(r-1)k}` for `0 <= i < k` on `rk` positions.
    pub fn crossing_matching(r: usize, k: usize) -> Result<Self> {
        if r < 2 {
            return Err(invalid(format!("crossing matching needs r >= 2, got {r}")));
        }
        if k < 2 {
            return Err(invalid(format!("crossing matching needs k >= 2, got {k}")));
        }
        let edges: Vec<Edge> = (0..k).map(|i| (0..r).map(|t| i + t * k).collect()).collect();
        let mut p = Pattern::new(r * k, r, Mode::Linear, edges)?;
        p.name = Some(format!("cm:{r}:{k}"));
        Ok(p)
    }

    /// Parses a built-in name `cp:<r>:<k>` or `cm:<r>:<k>` (linear mode).
    pub fn from_name(name: &str) -> Result<Self> {
        let parts: Vec<&str> = name.split(':').collect();
        let bad = || invalid(format!("unknown pattern `{name}` (expected cp:<r>:<k> or cm:<r>:<k>)"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let r: usize = parts[1].parse().map_err(|_| bad())?;
        let k: usize = parts[2].parse().map_err(|_| bad())?;
        match parts[0] {
            "cp" => Pattern::crossing_path(r, k),
            "cm" => Pattern::crossing_matching(r, k),
            _ => Err(bad()),
        }
    }

    pub fn with_mode(&self, mode: Mode) -> Self {
        Pattern { mode, ..self.clone() }
    }

    pub fn vertex_count(&self) -> usize {
        self.v
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

    /// Built-in name, or `None` for patterns loaded from files.
    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Name for reports: the built-in name or `custom`.
    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| "custom".into())
    }

    /// The pattern as a hypergraph on `0..v`.
    pub fn to_hypergraph(&self) -> Hypergraph {
        Hypergraph::from_sorted_unchecked(self.v, self.r, self.mode, self.edges.clone())
    }

    /// The pattern with positions relabeled so that position `rotation`
    /// becomes position 0 (cyclic shift of the reading order).
    pub(crate) fn rotated_edges(&self, rotation: usize) -> Vec<Edge> {
        let v = self.v;
        let mut edges: Vec<Edge> = self
            .edges
            .iter()
            .map(|e| {
                let mut f: Edge = e.iter().map(|&q| (q + v - rotation) % v).collect();
                f.sort_unstable();
                f
            })
            .collect();
        edges.sort_unstable();
        edges
    }

    pub(crate) fn check_compatible(&self, host: &Hypergraph) -> Result<()> {
        if host.r() != self.r {
            return Err(Error::UniformityMismatch { host: host.r(), pattern: self.r });
        }
        if host.mode() != self.mode {
            return Err(Error::ModeMismatch { host: host.mode(), pattern: self.mode });
        }
        Ok(())
    }
}

/// `pos[j]` is the position of path vertex `v_j` in `CP_k^r`.
pub fn crossing_path_positions(r: usize, k: usize) -> Vec<usize> {
    let m = k + r - 1;
    let mut pos = vec![0; m];
    let mut next = 0;
    for chain in 0..r.min(m) {
        let mut j = chain;
        while j < m {
            pos[j] = next;
            next += 1;
            j += r;
        }
    }
    pos
}
