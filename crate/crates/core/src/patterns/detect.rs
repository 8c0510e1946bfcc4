use std::collections::HashMap;

use itertools::Itertools;

use super::Pattern;
use crate::error::{Error, Result};
use crate::hypergraph::{Embedding, Hypergraph, Mode};
use crate::par;

/// Default cap on covered host vertices for [`contains_bruteforce`].
pub const DEFAULT_BRUTEFORCE_LIMIT: usize = 12;

/// Backtracking containment search over one host.
///
/// Pattern positions are embedded left to right into increasing host
/// vertices. When a position closes a pattern edge, its candidates come from
/// the host edges sharing the edge's first `r-1` images (the completion
/// index), so most branches never materialize.
pub struct Detector<'a> {
    host: &'a Hypergraph,
    completions: HashMap<&'a [usize], Vec<usize>>,
}

struct Plan {
    v: usize,
    /// For each position, the prefixes (as positions) of pattern edges whose
    /// largest position it is.
    closing: Vec<Vec<Vec<usize>>>,
}

impl<'a> Detector<'a> {
    pub fn new(host: &'a Hypergraph) -> Self {
        let r = host.r();
        let mut completions: HashMap<&[usize], Vec<usize>> = HashMap::new();
        for e in host.edges() {
            completions.entry(&e[..r - 1]).or_default().push(e[r - 1]);
        }
        Detector { host, completions }
    }

    /// Lexicographically least witness under (rotation, reading order).
    pub fn find(&self, pattern: &Pattern) -> Result<Option<Embedding>> {
        pattern.check_compatible(self.host)?;
        let v = pattern.vertex_count();
        if v > self.host.n() || self.host.edge_count() < pattern.edge_count() {
            return Ok(None);
        }
        let rotations: Vec<usize> = match pattern.mode() {
            Mode::Linear => vec![0],
            Mode::Cyclic => (0..v).collect(),
        };
        let found = par::find_map_first(rotations, |rho| {
            let plan = self.plan(pattern, rho);
            let mut img = Vec::with_capacity(v);
            if self.extend(&plan, &mut img) {
                Some((rho, img))
            } else {
                None
            }
        });
        Ok(found.map(|(rho, img)| {
            let map = (0..v).map(|q| img[(q + v - rho) % v]).collect();
            Embedding { map, rotation: rho }
        }))
    }

    fn plan(&self, pattern: &Pattern, rotation: usize) -> Plan {
        let v = pattern.vertex_count();
        let mut closing = vec![Vec::new(); v];
        for e in pattern.rotated_edges(rotation) {
            let last = *e.last().expect("nonempty edge");
            closing[last].push(e[..e.len() - 1].to_vec());
        }
        Plan { v, closing }
    }

    fn extend(&self, plan: &Plan, img: &mut Vec<usize>) -> bool {
        let p = img.len();
        if p == plan.v {
            return true;
        }
        let lo = if p == 0 { 0 } else { img[p - 1] + 1 };
        let hi = self.host.n() - (plan.v - p);
        if lo > hi {
            return false;
        }
        let closing = &plan.closing[p];
        if closing.is_empty() {
            for x in lo..=hi {
                img.push(x);
                if self.extend(plan, img) {
                    return true;
                }
                img.pop();
            }
            return false;
        }
        let mut prefixes: Vec<Vec<usize>> = closing.iter().map(|pre| pre.iter().map(|&q| img[q]).collect()).collect();
        // the sparsest completion list drives the loop
        let mut lists: Vec<&[usize]> = Vec::with_capacity(prefixes.len());
        for pre in prefixes.drain(..) {
            match self.completions.get(pre.as_slice()) {
                Some(list) => lists.push(list.as_slice()),
                None => return false,
            }
        }
        lists.sort_by_key(|l| l.len());
        let (driver, rest) = lists.split_first().expect("at least one closing edge");
        let start = driver.partition_point(|&x| x < lo);
        for &x in &driver[start..] {
            if x > hi {
                break;
            }
            if rest.iter().all(|l| l.binary_search(&x).is_ok()) {
                img.push(x);
                if self.extend(plan, img) {
                    return true;
                }
                img.pop();
            }
        }
        false
    }
}

/// Finds an order-preserving copy of `pattern` in `host`.
///
/// Linear mode asks for a strictly increasing map of positions; cyclic mode
/// allows any rotation of the position sequence. Returns the witness that is
/// least by rotation first and then by its increasing image sequence.
pub fn contains(host: &Hypergraph, pattern: &Pattern) -> Result<Option<Embedding>> {
    Detector::new(host).find(pattern)
}

/// Exhaustive containment over all injections into covered host vertices.
/// Same contract as [`contains`]; refuses hosts with more than `limit`
/// covered vertices.
pub fn contains_bruteforce(host: &Hypergraph, pattern: &Pattern, limit: usize) -> Result<Option<Embedding>> {
    pattern.check_compatible(host)?;
    let covered = host.covered_vertices();
    if covered.len() > limit {
        return Err(Error::TooLarge {
            what: "covered host vertices",
            size: covered.len() as u128,
            limit: limit as u128,
        });
    }
    let v = pattern.vertex_count();
    if v > covered.len() {
        return Ok(None);
    }
    let mut best: Option<(usize, Vec<usize>, Vec<usize>)> = None;
    for map in covered.iter().copied().permutations(v) {
        let rotation = match pattern.mode() {
            Mode::Linear => 0,
            Mode::Cyclic => (0..v).min_by_key(|&q| map[q]).expect("nonempty"),
        };
        let reading: Vec<usize> = (0..v).map(|i| map[(rotation + i) % v]).collect();
        if reading.windows(2).any(|w| w[0] >= w[1]) {
            continue;
        }
        let hits_host = pattern.edges().iter().all(|e| {
            let mut img: Vec<usize> = e.iter().map(|&q| map[q]).collect();
            img.sort_unstable();
            host.contains_edge(&img)
        });
        if !hits_host {
            continue;
        }
        let better = match &best {
            None => true,
            Some((rho, read, _)) => (rotation, &reading) < (*rho, read),
        };
        if better {
            best = Some((rotation, reading, map));
        }
    }
    Ok(best.map(|(rotation, _, map)| Embedding { map, rotation }))
}

/// Checks a witness from first principles: injective, order preserving for
/// the pattern's mode, and every pattern edge lands on a host edge.
pub fn validate_embedding(host: &Hypergraph, pattern: &Pattern, emb: &Embedding) -> std::result::Result<(), String> {
    let v = pattern.vertex_count();
    if emb.map.len() != v {
        return Err(format!("map has {} entries for {v} positions", emb.map.len()));
    }
    if let Some(&x) = emb.map.iter().find(|&&x| x >= host.n()) {
        return Err(format!("vertex {x} outside host"));
    }
    match pattern.mode() {
        Mode::Linear => {
            if emb.rotation != 0 {
                return Err("linear witness must use rotation 0".into());
            }
        }
        Mode::Cyclic => {
            if emb.rotation >= v {
                return Err(format!("rotation {} out of range", emb.rotation));
            }
        }
    }
    let reading = emb.reading();
    if reading.windows(2).any(|w| w[0] >= w[1]) {
        return Err(format!("images {reading:?} are not strictly increasing in reading order"));
    }
    for e in pattern.edges() {
        let mut img: Vec<usize> = e.iter().map(|&q| emb.map[q]).collect();
        img.sort_unstable();
        if !host.contains_edge(&img) {
            return Err(format!("pattern edge {e:?} maps to non-edge {img:?}"));
        }
    }
    Ok(())
}
