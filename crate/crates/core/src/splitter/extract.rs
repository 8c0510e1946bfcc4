use std::collections::{HashMap, HashSet};

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use serde::Serialize;

use crate::combinatorics::binomial;
use crate::error::{invalid, Error, Result};
use crate::format::ser_rational;
use crate::hypergraph::{without, Edge, Hypergraph, Mode, WeightedHypergraph};
use crate::par;
use crate::patterns::intervals_from_starts;
use crate::patterns::{check_split_certificate, Interval, SplitCertificate};

/// `psi(r) = r^(5 r^2)`, the loss factor allowed for split extraction.
pub fn psi(r: usize) -> BigUint {
    BigUint::from(r).pow((5 * r * r) as u32)
}

/// `r^(5r)`, the loss factor allowed for bipartite extraction.
pub fn bipartite_loss(r: usize) -> BigUint {
    BigUint::from(r).pow((5 * r) as u32)
}

/// `c_r = 1 - 1/r^(5r-1)`: the share of the weight left outside the `r`
/// one-vertex subgraphs when none of them is heavy.
pub fn c_r(r: usize) -> BigRational {
    BigRational::one() - BigRational::new(BigInt::one(), BigInt::from(r).pow((5 * r - 1) as u32))
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ExtractConfig {
    /// Vertex count at or below which the recursion returns a heaviest edge;
    /// `None` means `r^5` for the current uniformity.
    pub base_threshold: Option<usize>,
}

impl ExtractConfig {
    fn threshold(&self, r: usize) -> usize {
        self.base_threshold.unwrap_or_else(|| r.pow(5))
    }
}

/// Structure certificate of an extracted subgraph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    /// Cyclic interval meeting every edge in exactly one vertex.
    Bipartite(Interval),
    Split(SplitCertificate),
}

/// Output of the extraction routines.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtractionResult {
    /// `H(w_G)`, read cyclically.
    #[serde(skip)]
    pub subgraph: Hypergraph,
    /// `w_G`, the input weights restricted to the subgraph.
    #[serde(skip)]
    pub weights: WeightedHypergraph,
    pub certificate: Certificate,
    /// `d(w_G) / d(w)`.
    #[serde(serialize_with = "ser_rational")]
    pub density_ratio: BigRational,
    /// The ratio the construction promises: `r^(-5r)` or `1/psi(r)`.
    #[serde(serialize_with = "ser_rational")]
    pub guarantee: BigRational,
    /// Recursive frames visited (bipartite frames across all uniformities).
    pub frames: usize,
}

impl ExtractionResult {
    pub fn meets_guarantee(&self) -> bool {
        self.density_ratio >= self.guarantee
    }

    /// Re-checks the certificate against the subgraph.
    pub fn validate(&self) -> std::result::Result<(), String> {
        match &self.certificate {
            Certificate::Bipartite(x) => check_bipartite_certificate(&self.subgraph, x),
            Certificate::Split(cert) => check_split_certificate(&self.subgraph, cert),
        }
    }
}

/// Every edge of `h` has exactly one vertex in the cyclic interval `x`.
pub fn check_bipartite_certificate(h: &Hypergraph, x: &Interval) -> std::result::Result<(), String> {
    let n = h.n();
    if x.len == 0 || x.len > n || x.start >= n {
        return Err(format!("interval {x:?} does not fit 0..{n}"));
    }
    for e in h.edges() {
        let c = e.iter().filter(|&&v| x.contains(v, n)).count();
        if c != 1 {
            return Err(format!("edge {e:?} has {c} vertices in {x:?}"));
        }
    }
    Ok(())
}

struct Found {
    weights: WeightedHypergraph,
    x: Interval,
}

fn density(w: &WeightedHypergraph) -> BigRational {
    w.codegree_density().expect("nonempty")
}

/// `a` unless `b` is strictly denser.
fn better(a: Found, b: Found) -> Found {
    if density(&b.weights) > density(&a.weights) {
        b
    } else {
        a
    }
}

fn heaviest_edge(w: &WeightedHypergraph) -> Found {
    let (e, x) = w
        .iter()
        .fold(None::<(&Edge, &BigRational)>, |best, (e, x)| match best {
            Some((_, bx)) if bx >= x => best,
            _ => Some((e, x)),
        })
        .expect("nonempty");
    let single = w.filter(|f| f == e.as_slice());
    debug_assert_eq!(single.total(), *x);
    Found { weights: single, x: Interval::new(e[0], 1) }
}

/// Splits sorted vertices into `r` consecutive runs, sizes nondecreasing and
/// differing by at most one.
fn near_equal_runs(vertices: &[usize], r: usize) -> Vec<&[usize]> {
    let v = vertices.len();
    let base = v / r;
    let extra = v % r;
    let mut out = Vec::with_capacity(r);
    let mut start = 0;
    for i in 0..r {
        let len = base + usize::from(i >= r - extra);
        out.push(&vertices[start..start + len]);
        start += len;
    }
    out
}

fn bipartite_rec(w: &WeightedHypergraph, threshold: usize, frames: &mut usize) -> Found {
    *frames += 1;
    let r = w.r();
    let n = w.n();
    let top = heaviest_edge(w);
    let covered = w.covered_vertices();
    let v = covered.len();
    if v <= threshold {
        return top;
    }
    let runs = near_equal_runs(&covered, r);
    let mut run_of = vec![usize::MAX; n];
    for (j, run) in runs.iter().enumerate() {
        for &x in *run {
            run_of[x] = j;
        }
    }
    let xs: Vec<Interval> = runs.iter().map(|run| Interval::new(run[0], run[run.len() - 1] - run[0] + 1)).collect();
    let counts = |e: &[usize]| {
        let mut c = vec![0usize; r];
        for &x in e {
            c[run_of[x]] += 1;
        }
        c
    };
    let total = w.total();
    let loss = BigRational::from_integer(BigInt::from(bipartite_loss(r)));

    let one_vertex: Vec<WeightedHypergraph> = par::map((0..r).collect(), |j| w.filter(|e| counts(e)[j] == 1));
    let mut chosen: Option<(usize, BigRational)> = None;
    for (j, wj) in one_vertex.iter().enumerate() {
        if wj.is_empty() || wj.total() * &loss < total {
            continue;
        }
        let d = density(wj);
        if chosen.as_ref().is_none_or(|(_, bd)| d > *bd) {
            chosen = Some((j, d));
        }
    }
    if let Some((j, _)) = chosen {
        let found = Found { weights: one_vertex[j].clone(), x: xs[j] };
        return better(found, top);
    }

    let f = w.filter(|e| !counts(e).contains(&1));
    assert!(f.total() > c_r(r) * &total, "weight outside the one-vertex subgraphs is too small");
    let half = r / 2;
    let subsets: Vec<Vec<usize>> = (0..r).combinations(half).collect();
    let candidates: Vec<WeightedHypergraph> =
        par::map(subsets, |s| f.filter(|e| e.iter().all(|&x| s.contains(&run_of[x]))));
    let mut best = 0;
    let mut best_total = candidates[0].total();
    for (i, c) in candidates.iter().enumerate().skip(1) {
        let t = c.total();
        if t > best_total {
            best = i;
            best_total = t;
        }
    }
    let ws = &candidates[best];
    assert!(
        BigRational::from_integer(BigInt::from(binomial(r as u64, half as u64))) * &best_total >= f.total(),
        "pigeonhole subset is too light"
    );
    let vs = ws.vertex_count();
    assert!(vs < v, "recursion must shrink the vertex set ({vs} >= {v})");
    assert!(2 * vs <= v + r, "recursion must roughly halve the vertex set");
    better(bipartite_rec(ws, threshold, frames), top)
}

fn prepare(w: &WeightedHypergraph) -> Result<WeightedHypergraph> {
    if w.r() < 3 {
        return Err(invalid(format!("extraction needs r >= 3, got {}", w.r())));
    }
    if w.is_empty() {
        return Err(Error::EmptyHypergraph);
    }
    Ok(w.with_mode(Mode::Cyclic))
}

fn finish(
    input: &WeightedHypergraph,
    weights: WeightedHypergraph,
    certificate: Certificate,
    guarantee: BigRational,
    frames: usize,
) -> Result<ExtractionResult> {
    let density_ratio = weights.codegree_density()? / input.codegree_density()?;
    Ok(ExtractionResult { subgraph: weights.support(), weights, certificate, density_ratio, guarantee, frames })
}

/// Finds a bipartite subgraph: a cyclic interval `X` met by every edge exactly
/// once, with `d(w_G) >= d(w) / r^(5r)`.
///
/// Above the base threshold the covered vertices are cut into `r` near-equal
/// runs; a run whose one-vertex edges carry at least `|w|/r^(5r)` is taken
/// directly (densest such run, then smallest index). Otherwise the weight sits
/// on edges meeting every run they touch at least twice, and the recursion
/// continues on the heaviest restriction to `floor(r/2)` runs. Every frame
/// keeps the denser of its answer and its heaviest edge. Linear inputs are
/// read cyclically.
pub fn extract_bipartite(w: &WeightedHypergraph, config: &ExtractConfig) -> Result<ExtractionResult> {
    let w = prepare(w)?;
    let r = w.r();
    let mut frames = 0;
    let found = bipartite_rec(&w, config.threshold(r), &mut frames);
    let guarantee = BigRational::new(BigInt::one(), BigInt::from(bipartite_loss(r)));
    let result = finish(&w, found.weights, Certificate::Bipartite(found.x), guarantee, frames)?;
    debug_assert_eq!(result.validate(), Ok(()));
    Ok(result)
}

/// Bipartite interval `X` as a two-part split certificate with the
/// complement doubled.
fn bipartite_as_split(x: Interval, n: usize) -> SplitCertificate {
    let rest = Interval::new((x.start + x.len) % n, n - x.len);
    SplitCertificate { parts: vec![x, rest], doubled: 2 }
}

fn split_rec(
    w: &WeightedHypergraph,
    config: &ExtractConfig,
    frames: &mut usize,
) -> (WeightedHypergraph, SplitCertificate) {
    let r = w.r();
    let n = w.n();
    let f = bipartite_rec(w, config.threshold(r), frames);
    if r == 3 {
        return (f.weights, bipartite_as_split(f.x, n));
    }
    let x = f.x;
    let mut tau = WeightedHypergraph::new(n, r - 1, Mode::Cyclic).expect("r > 3");
    for (e, wt) in f.weights.iter() {
        let i = e.iter().position(|&v| x.contains(v, n)).expect("bipartite edge meets X");
        tau.add(&without(e, i), wt.clone()).expect("valid (r-1)-set");
    }
    let (tau_e, e_cert) = split_rec(&tau, config, frames);
    let e_sets: HashSet<&[usize]> = tau_e.iter().map(|(e, _)| e.as_slice()).collect();

    let x_f: Vec<usize> = f.weights.covered_vertices().into_iter().filter(|&v| x.contains(v, n)).collect();
    let m = tau_e.vertex_count().min(x_f.len());
    let in_x_f: HashSet<usize> = x_f.iter().copied().collect();

    // score(z) = sum over f in E of w(f + z); the top m beat a uniform m-subset on average
    let mut lifts: Vec<(usize, Edge, BigRational)> = Vec::new();
    for (e, wt) in w.iter() {
        for (i, &z) in e.iter().enumerate() {
            if in_x_f.contains(&z) {
                let rest = without(e, i);
                if e_sets.contains(rest.as_slice()) {
                    lifts.push((z, e.clone(), wt.clone()));
                }
            }
        }
    }
    let mut score: HashMap<usize, BigRational> = HashMap::new();
    for (z, _, wt) in &lifts {
        *score.entry(*z).or_insert_with(BigRational::zero) += wt;
    }
    let zero = BigRational::zero();
    let mut ranked = x_f.clone();
    ranked.sort_by(|a, b| {
        let sa = score.get(a).unwrap_or(&zero);
        let sb = score.get(b).unwrap_or(&zero);
        sb.cmp(sa).then(a.cmp(b))
    });
    let z1: HashSet<usize> = ranked[..m].iter().copied().collect();
    let g = WeightedHypergraph::from_weights(
        n,
        r,
        Mode::Cyclic,
        lifts.into_iter().filter(|(z, _, _)| z1.contains(z)).map(|(_, e, wt)| (e, wt)),
    )
    .expect("valid r-sets");
    lift_certificate(&g, &e_cert, &z1)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Side {
    A,
    B,
}

/// Places the new part `Z_1` into the certificate of the `(r-1)`-graph.
///
/// `Z_1` lies in a gap between consecutive vertices of the lower certificate.
/// If that gap separates two different parts, `Z_1` simply becomes a part of
/// its own. If it falls inside one part `P`, that part is cut into a side `a`
/// before `Z_1` and a side `b` after it, and the edges are sorted by how their
/// `P`-vertices fall: only `a` or only `b` (the unused side then joins the
/// neighbouring part), or, for a doubled `P`, one on each side, in which case
/// `b` joins `Z_1` and that union becomes the doubled part. The densest class
/// wins.
fn lift_certificate(
    g: &WeightedHypergraph,
    lower: &SplitCertificate,
    z1: &HashSet<usize>,
) -> (WeightedHypergraph, SplitCertificate) {
    let n = g.n();
    let z_label = lower.parts.len();
    let lower_doubled = lower.doubled - 1;
    let label = |v: usize| -> usize {
        if z1.contains(&v) {
            z_label
        } else {
            lower.parts.iter().position(|p| p.contains(v, n)).expect("parts cover 0..n")
        }
    };
    let seq: Vec<usize> = g.covered_vertices();
    let labels: Vec<usize> = seq.iter().map(|&v| label(v)).collect();
    let len = seq.len();
    let first_z = (0..len)
        .find(|&i| labels[i] == z_label && labels[(i + len - 1) % len] != z_label)
        .expect("Z_1 is nonempty and not everything");
    let last_z = (0..len).find(|&i| labels[i] == z_label && labels[(i + 1) % len] != z_label).expect("Z_1 block ends");
    let before = labels[(first_z + len - 1) % len];
    let after = labels[(last_z + 1) % len];

    let mut candidates: Vec<(WeightedHypergraph, HashMap<usize, usize>, usize)> = Vec::new();
    if before != after {
        candidates.push((g.clone(), HashMap::new(), lower_doubled));
    } else {
        let p = before;
        let mut side: HashMap<usize, Side> = HashMap::new();
        let mut i = (first_z + len - 1) % len;
        while labels[i] == p && !side.contains_key(&seq[i]) {
            side.insert(seq[i], Side::A);
            i = (i + len - 1) % len;
        }
        let mut i = (last_z + 1) % len;
        while labels[i] == p && !side.contains_key(&seq[i]) {
            side.insert(seq[i], Side::B);
            i = (i + 1) % len;
        }
        let class = |e: &[usize]| {
            let a = e.iter().filter(|v| side.get(v) == Some(&Side::A)).count();
            let b = e.iter().filter(|v| side.get(v) == Some(&Side::B)).count();
            (a, b)
        };
        let want: Vec<(usize, usize)> =
            if p == lower_doubled { vec![(2, 0), (0, 2), (1, 1)] } else { vec![(1, 0), (0, 1)] };
        for target in want {
            let sub = g.filter(|e| class(e) == target);
            if sub.is_empty() {
                continue;
            }
            let mut relabel = HashMap::new();
            let mut doubled = lower_doubled;
            if target == (1, 1) {
                for (&v, &s) in &side {
                    if s == Side::B {
                        relabel.insert(v, z_label);
                    }
                }
                doubled = z_label;
            }
            candidates.push((sub, relabel, doubled));
        }
    }

    let mut best: Option<(WeightedHypergraph, SplitCertificate, BigRational)> = None;
    for (sub, relabel, doubled) in candidates {
        let cert = certificate_from_labels(&sub, |v| relabel.get(&v).copied().unwrap_or_else(|| label(v)), doubled);
        debug_assert_eq!(check_split_certificate(&sub.support(), &cert), Ok(()));
        let d = density(&sub);
        if best.as_ref().is_none_or(|(_, _, bd)| d > *bd) {
            best = Some((sub, cert, d));
        }
    }
    let (g, cert, _) = best.expect("some class is nonempty");
    (g, cert)
}

/// Parts from runs of equal labels around the circle; each run starts at its
/// first covered vertex and extends to the next run.
fn certificate_from_labels<L: Fn(usize) -> usize>(
    g: &WeightedHypergraph,
    label: L,
    doubled_label: usize,
) -> SplitCertificate {
    let n = g.n();
    let seq = g.covered_vertices();
    let labels: Vec<usize> = seq.iter().map(|&v| label(v)).collect();
    let len = seq.len();
    let start = (0..len).find(|&i| labels[i] != labels[(i + len - 1) % len]).expect("at least two labels");
    let mut starts = Vec::new();
    let mut run_labels = Vec::new();
    for k in 0..len {
        let i = (start + k) % len;
        if k == 0 || labels[i] != labels[(i + len - 1) % len] {
            starts.push(seq[i]);
            run_labels.push(labels[i]);
        }
    }
    assert!(run_labels.iter().all_unique(), "label runs must be contiguous");
    assert_eq!(run_labels.len(), g.r() - 1, "one run per part");
    let parts = intervals_from_starts(&starts, n);
    let doubled = run_labels.iter().position(|&l| l == doubled_label).expect("doubled part present") + 1;
    SplitCertificate { parts, doubled }
}

/// Finds a split subgraph with `d(w_G) >= d(w) / psi(r)`.
///
/// For `r = 3` this is [`extract_bipartite`] with the certificate rewritten
/// as `X` plus its doubled complement. For larger `r` a bipartite `F` with
/// part `X` is extracted, every edge loses its `X`-vertex to give the
/// `(r-1)`-uniform weighting `tau(f) = sum w(f + x)`, the recursion returns a
/// split `E`, and `E` is lifted by the `m = min(v(tau_E), |X|)` vertices of
/// `X` with the largest weight towards `E`.
pub fn extract_split(w: &WeightedHypergraph, config: &ExtractConfig) -> Result<ExtractionResult> {
    let w = prepare(w)?;
    let r = w.r();
    let mut frames = 0;
    let (g, cert) = split_rec(&w, config, &mut frames);
    let guarantee = BigRational::new(BigInt::one(), BigInt::from(psi(r)));
    let result = finish(&w, g, Certificate::Split(cert), guarantee, frames)?;
    debug_assert_eq!(result.validate(), Ok(()));
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{clustered_weighted, random_weighted};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn constants() {
        assert_eq!(psi(3), BigUint::from(3u32).pow(45u32));
        assert_eq!(bipartite_loss(3), BigUint::from(14_348_907u32));
        assert!(c_r(3) > rat(99, 100));
    }

    #[test]
    fn single_edge() {
        let w = Hypergraph::new(5, 3, Mode::Cyclic, [[0, 2, 4]]).unwrap().to_weighted();
        let res = extract_bipartite(&w, &ExtractConfig::default()).unwrap();
        assert_eq!(res.density_ratio, rat(1, 1));
        assert_eq!(res.subgraph.edges(), w.support().edges());
        res.validate().unwrap();
    }

    #[test]
    fn complete_six_three_hits_base_case() {
        let w = Hypergraph::complete(6, 3, Mode::Cyclic).unwrap().to_weighted();
        let res = extract_bipartite(&w, &ExtractConfig::default()).unwrap();
        assert_eq!(res.subgraph.edges(), &[vec![0, 1, 2]]);
        assert_eq!(res.density_ratio, rat(1, 5));
        assert_eq!(res.frames, 1);
        assert!(res.meets_guarantee());
    }

    #[test]
    fn errors() {
        let empty = WeightedHypergraph::new(6, 3, Mode::Cyclic).unwrap();
        assert!(matches!(extract_bipartite(&empty, &ExtractConfig::default()), Err(Error::EmptyHypergraph)));
        assert!(extract_split(&empty, &ExtractConfig::default()).is_err());
        let two = Hypergraph::complete(4, 2, Mode::Cyclic).unwrap().to_weighted();
        assert!(extract_split(&two, &ExtractConfig::default()).is_err());
    }

    #[test]
    fn split_agrees_with_bipartite_at_three() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let w = random_weighted(400, 3, 1500, 9, &mut rng).unwrap();
        let b = extract_bipartite(&w, &ExtractConfig::default()).unwrap();
        let s = extract_split(&w, &ExtractConfig::default()).unwrap();
        assert_eq!(b.subgraph, s.subgraph);
        assert_eq!(b.density_ratio, s.density_ratio);
        s.validate().unwrap();
        let Certificate::Bipartite(x) = b.certificate else { panic!() };
        assert_eq!(s.certificate, Certificate::Split(bipartite_as_split(x, w.n())));
    }

    #[test]
    fn complete_four_uniform() {
        let w = Hypergraph::complete(9, 4, Mode::Cyclic).unwrap().to_weighted();
        let res = extract_split(&w, &ExtractConfig::default()).unwrap();
        res.validate().unwrap();
        assert!(res.meets_guarantee());
        let Certificate::Split(cert) = &res.certificate else { panic!() };
        assert_eq!(cert.parts.len(), 3);
    }

    #[test]
    fn small_threshold_forces_lifting() {
        let config = ExtractConfig { base_threshold: Some(6) };
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for r in [4, 5] {
                let w = random_weighted(30, r, 200, 5, &mut rng).unwrap();
                let res = extract_split(&w, &config).unwrap();
                res.validate().unwrap();
                assert!(res.frames > 1);
            }
        }
    }

    #[test]
    fn clustered_input_recurses() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let w = clustered_weighted(3, 729, 9, &mut rng).unwrap();
        assert!(w.vertex_count() > 243);
        let res = extract_bipartite(&w, &ExtractConfig::default()).unwrap();
        res.validate().unwrap();
        assert!(res.frames >= 2);
        assert!(res.meets_guarantee());
    }

    #[test]
    fn deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let w = random_weighted(60, 4, 400, 7, &mut rng).unwrap();
        let config = ExtractConfig { base_threshold: Some(10) };
        assert_eq!(extract_split(&w, &config).unwrap(), extract_split(&w, &config).unwrap());
    }
}
