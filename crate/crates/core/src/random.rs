//! Seeded instance generators for property checks and benchmarks.

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::index::sample;
use rand::Rng;

use crate::error::{invalid, Result};
use crate::hypergraph::{Edge, Hypergraph, Mode, WeightedHypergraph};
use crate::patterns::Pattern;

fn random_set<R: Rng + ?Sized>(n: usize, r: usize, rng: &mut R) -> Edge {
    let mut e = sample(rng, n, r).into_vec();
    e.sort_unstable();
    e
}

fn random_weight<R: Rng + ?Sized>(max_weight: u32, rng: &mut R) -> BigRational {
    let p = rng.random_range(1..=max_weight.max(1));
    let q = rng.random_range(1..=3u32);
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Every r-subset of `0..n` independently with probability `p`.
pub fn random_hypergraph<R: Rng + ?Sized>(n: usize, r: usize, mode: Mode, p: f64, rng: &mut R) -> Result<Hypergraph> {
    if r == 0 || n < r {
        return Err(invalid(format!("need 1 <= r <= n, got n = {n}, r = {r}")));
    }
    let edges: Vec<Edge> = (0..n).combinations(r).filter(|_| rng.random_bool(p)).collect();
    Hypergraph::new(n, r, mode, edges)
}

/// A pattern built from `m` random r-sets of `0..v`, compacted to its
/// covered positions.
pub fn random_pattern<R: Rng + ?Sized>(v: usize, r: usize, m: usize, mode: Mode, rng: &mut R) -> Result<Pattern> {
    if m == 0 || v < r {
        return Err(invalid("a random pattern needs at least one edge and v >= r"));
    }
    let edges: Vec<Edge> = (0..m).map(|_| random_set(v, r, rng)).collect();
    Pattern::from_hypergraph(&Hypergraph::new(v, r, mode, edges)?)
}

/// `m` random r-sets of `0..n` (repeats merge) with rational weights
/// `p/q`, `1 <= p <= max_weight`, `1 <= q <= 3`.
pub fn random_weighted<R: Rng + ?Sized>(
    n: usize,
    r: usize,
    m: usize,
    max_weight: u32,
    rng: &mut R,
) -> Result<WeightedHypergraph> {
    if r == 0 || n < r {
        return Err(invalid(format!("need 1 <= r <= n, got n = {n}, r = {r}")));
    }
    let mut w = WeightedHypergraph::new(n, r, Mode::Cyclic)?;
    for _ in 0..m {
        let e = random_set(n, r, rng);
        w.add(&e, random_weight(max_weight, rng))?;
    }
    Ok(w)
}

/// Weights confined to consecutive blocks of `block` vertices on `0..v`, every
/// vertex covered. No edge has a lone vertex in any block-aligned run, which
/// pushes bipartite extraction into its recursive step when the runs are
/// block-aligned (e.g. `v = r^a * block` for `r = 3`).
pub fn clustered_weighted<R: Rng + ?Sized>(
    r: usize,
    v: usize,
    block: usize,
    rng: &mut R,
) -> Result<WeightedHypergraph> {
    if block < r || !v.is_multiple_of(block) {
        return Err(invalid("blocks must hold at least r vertices and tile 0..v"));
    }
    let mut w = WeightedHypergraph::new(v, r, Mode::Cyclic)?;
    for b in (0..v).step_by(block) {
        for i in (0..block).step_by(r) {
            let s = i.min(block - r);
            let e: Edge = (b + s..b + s + r).collect();
            w.add(&e, random_weight(9, rng))?;
        }
        for _ in 0..block {
            let e: Edge = random_set(block, r, rng).into_iter().map(|x| x + b).collect();
            w.add(&e, random_weight(9, rng))?;
        }
    }
    Ok(w)
}

/// The `index`-th instance of the splitter property harness for uniformity
/// `r`: even indices are uniform random weightings on up to 2000 vertices,
/// odd ones are block-clustered weightings sized so that bipartite extraction
/// recurses at least once.
pub fn splitter_instance<R: Rng + ?Sized>(r: usize, index: usize, rng: &mut R) -> Result<WeightedHypergraph> {
    if index.is_multiple_of(2) {
        let n = rng.random_range(r + 2..=2000);
        let m = rng.random_range(1..=3 * n);
        random_weighted(n, r, m, 20, rng)
    } else {
        let (v, block) = match r {
            3 => (729, 9),
            4 => (1536, 8),
            _ => {
                let block = 2 * r;
                let parts = r.pow(5) / block + 1;
                (parts * block * r, block)
            }
        };
        clustered_weighted(r, v, block, rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_are_seeded() {
        let a = random_weighted(50, 3, 40, 5, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let b = random_weighted(50, 3, 40, 5, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(a, b);
        let h = random_hypergraph(8, 2, Mode::Linear, 0.5, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert!(h.edge_count() <= 28);
        let p = random_pattern(5, 2, 3, Mode::Cyclic, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert!(p.vertex_count() <= 5);
    }

    #[test]
    fn clustered_covers_everything() {
        let w = clustered_weighted(4, 1536, 8, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(w.vertex_count(), 1536);
        assert!(w.iter().all(|(e, _)| e[0] / 8 == e[3] / 8));
    }
}
