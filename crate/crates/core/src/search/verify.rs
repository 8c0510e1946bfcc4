use std::fmt::Write as _;
use std::time::Instant;

use itertools::Itertools;
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::cache::ValueCache;
use super::solver::{max_pattern_free, z_max_pattern_free, SolverConfig};
use crate::combinatorics::binomial;
use crate::constructions::{closed_form_count, complement_enumerator, consecutive_family};
use crate::error::{invalid, Result};
use crate::format::format_rational;
use crate::hypergraph::Mode;
use crate::patterns::{contains, partite_path_bound, Pattern};
use crate::random::splitter_instance;
use crate::splitter::{box_decomposition, extract_bipartite, extract_split, ExtractConfig};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyRow {
    pub params: Vec<String>,
    pub formula: String,
    pub computed: String,
    #[serde(rename = "match")]
    pub matched: bool,
    pub ms: u128,
}

/// One verification suite: a row per parameter tuple.
///
/// `relation` records what `match` means for the suite: `eq` is exact
/// equality of `computed` and `formula`, `le` is `computed <= formula`,
/// `ge` is `computed >= formula`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub relation: String,
    pub param_names: Vec<String>,
    pub rows: Vec<VerifyRow>,
}

impl VerifyReport {
    fn new(suite: &str, relation: &str, params: &[&str]) -> Self {
        VerifyReport {
            suite: suite.into(),
            relation: relation.into(),
            param_names: params.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(
        &mut self,
        params: Vec<String>,
        formula: impl ToString,
        computed: impl ToString,
        matched: bool,
        start: Instant,
    ) {
        debug_assert_eq!(params.len(), self.param_names.len());
        self.rows.push(VerifyRow {
            params,
            formula: formula.to_string(),
            computed: computed.to_string(),
            matched,
            ms: start.elapsed().as_millis(),
        });
    }

    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| r.matched)
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &VerifyRow> {
        self.rows.iter().filter(|r| !r.matched)
    }

    pub fn header(&self) -> Vec<String> {
        let mut h = self.param_names.clone();
        h.extend(["formula", "computed", "match", "ms"].map(String::from));
        h
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header().join(",");
        out.push('\n');
        for row in &self.rows {
            let _ =
                writeln!(out, "{},{},{},{},{}", row.params.join(","), row.formula, row.computed, row.matched, row.ms);
        }
        out
    }
}

fn s(x: impl ToString) -> String {
    x.to_string()
}

fn sizes_label(sizes: &[usize]) -> String {
    sizes.iter().join("x")
}

/// Solver front end with a value cache shared across suites.
#[derive(Clone, Debug, Default)]
pub struct Verifier {
    pub config: SolverConfig,
    pub cache: ValueCache,
}

impl Verifier {
    pub fn new(config: SolverConfig, cache: ValueCache) -> Self {
        Verifier { config, cache }
    }

    /// `ex(n, P)` in `mode`, through the cache. Only proved values are stored.
    pub fn ex(&mut self, n: usize, r: usize, pattern: &Pattern, mode: Mode) -> Result<usize> {
        let label = pattern.label();
        let cacheable = pattern.name().is_some();
        if cacheable {
            if let Some(v) = self.cache.get(n, r, &label, mode) {
                return Ok(v);
            }
        }
        let res = max_pattern_free(n, r, pattern, mode, &self.config)?;
        if !res.proved_optimal {
            return Err(invalid(format!("search for ex({n}, {label}) hit the node limit")));
        }
        if cacheable {
            self.cache.insert(n, r, &label, mode, res.value);
        }
        Ok(res.value)
    }

    /// `z(sizes, P)` through the cache.
    pub fn z(&mut self, sizes: &[usize], pattern: &Pattern) -> Result<usize> {
        let n: usize = sizes.iter().sum();
        let label = format!("{}@{}", pattern.label(), sizes_label(sizes));
        let cacheable = pattern.name().is_some();
        if cacheable {
            if let Some(v) = self.cache.get(n, sizes.len(), &label, Mode::Linear) {
                return Ok(v);
            }
        }
        let res = z_max_pattern_free(sizes, pattern, &self.config)?;
        if !res.proved_optimal {
            return Err(invalid(format!("search for z({label}) hit the node limit")));
        }
        if cacheable {
            self.cache.insert(n, sizes.len(), &label, Mode::Linear, res.value);
        }
        Ok(res.value)
    }

    /// Linear `ex(n, CP_k^r)` against `C(n, r) - C(n-k+1, r)` for
    /// `2 <= r <= max_r`, `1 <= k <= r+1`, `r+k <= n <= max_n`.
    pub fn closed_form(&mut self, max_n: usize, max_r: usize) -> Result<VerifyReport> {
        let mut report = VerifyReport::new("closed_form", "eq", &["n", "r", "k"]);
        for r in 2..=max_r {
            for k in 1..=r + 1 {
                for n in r + k..=max_n {
                    let start = Instant::now();
                    let p = Pattern::crossing_path(r, k)?;
                    let value = BigUint::from(self.ex(n, r, &p, Mode::Linear)?);
                    let formula = closed_form_count(n, r, k)?;
                    let ok = value == formula;
                    report.push(vec![s(n), s(r), s(k)], formula, value, ok, start);
                }
            }
        }
        Ok(report)
    }

    /// `ex(n, CP_k^r) <= C(n-2, r-2) + ex(n-2, CP_{k-1}^{r-1}) + ex(n-1, CP_k^r)`
    /// for `3 <= r <= max_r`, `2 <= k <= r+1`, `r+1 <= n <= max_n`.
    pub fn recurrence(&mut self, max_n: usize, max_r: usize) -> Result<VerifyReport> {
        let mut report = VerifyReport::new("recurrence", "le", &["n", "r", "k"]);
        for r in 3..=max_r {
            for k in 2..=r + 1 {
                for n in r + 1..=max_n {
                    let start = Instant::now();
                    let lhs = self.ex(n, r, &Pattern::crossing_path(r, k)?, Mode::Linear)?;
                    let lower = self.ex(n - 2, r - 1, &Pattern::crossing_path(r - 1, k - 1)?, Mode::Linear)?;
                    let prev = self.ex(n - 1, r, &Pattern::crossing_path(r, k)?, Mode::Linear)?;
                    let rhs = binomial((n - 2) as u64, (r - 2) as u64) + BigUint::from(lower + prev);
                    let ok = BigUint::from(lhs) <= rhs;
                    report.push(vec![s(n), s(r), s(k)], rhs, lhs, ok, start);
                }
            }
        }
        Ok(report)
    }

    /// `z(sizes, CP_k^r) <= k * sum_i prod_{j != i} n_j` for every sizes vector
    /// and `1 <= k <= k_max`.
    pub fn partite(&mut self, sizes_list: &[Vec<usize>], k_max: usize) -> Result<VerifyReport> {
        let mut report = VerifyReport::new("partite", "le", &["sizes", "r", "k"]);
        for sizes in sizes_list {
            let r = sizes.len();
            for k in 1..=k_max {
                let start = Instant::now();
                let value = self.z(sizes, &Pattern::crossing_path(r, k)?)?;
                let bound = partite_path_bound(sizes, k);
                let ok = BigUint::from(value) <= bound;
                report.push(vec![sizes_label(sizes), s(r), s(k)], bound, value, ok, start);
            }
        }
        Ok(report)
    }

    /// Cyclic against linear values: `<=` for crossing paths and other
    /// patterns, equality for crossing matchings. `formula` holds the linear
    /// value, `computed` the cyclic one.
    pub fn cyclic_vs_linear(&mut self, max_n: usize, patterns: &[Pattern]) -> Result<VerifyReport> {
        let mut report = VerifyReport::new("cyclic", "le", &["n", "pattern", "relation"]);
        for p in patterns {
            let r = p.r();
            let equal = p.name().is_some_and(|name| name.starts_with("cm:"));
            for n in r..=max_n {
                let start = Instant::now();
                let linear = self.ex(n, r, p, Mode::Linear)?;
                let cyclic = self.ex(n, r, p, Mode::Cyclic)?;
                let ok = if equal { cyclic == linear } else { cyclic <= linear };
                let rel = if equal { "eq" } else { "le" };
                report.push(vec![s(n), p.label(), s(rel)], linear, cyclic, ok, start);
            }
        }
        Ok(report)
    }
}

/// Compositions of at most `max_total` into `r` positive parts.
pub fn partite_sizes(r: usize, max_total: usize) -> Vec<Vec<usize>> {
    (r..=max_total)
        .flat_map(|total| {
            (1..total).combinations(r - 1).map(move |cuts| {
                let mut prev = 0;
                let mut sizes: Vec<usize> = cuts
                    .iter()
                    .map(|&c| {
                        let len = c - prev;
                        prev = c;
                        len
                    })
                    .collect();
                sizes.push(total - prev);
                sizes
            })
        })
        .collect()
}

pub fn verify_closed_form(max_n: usize, max_r: usize) -> Result<VerifyReport> {
    Verifier::default().closed_form(max_n, max_r)
}

pub fn verify_recurrence(max_n: usize, max_r: usize) -> Result<VerifyReport> {
    Verifier::default().recurrence(max_n, max_r)
}

pub fn verify_partite_bound(sizes_list: &[Vec<usize>], k_max: usize) -> Result<VerifyReport> {
    Verifier::default().partite(sizes_list, k_max)
}

pub fn verify_cyclic_vs_linear(max_n: usize, patterns: &[Pattern]) -> Result<VerifyReport> {
    Verifier::default().cyclic_vs_linear(max_n, patterns)
}

/// Consecutive families: edge count against the closed form; `match`
/// additionally requires the shifting procedure to enumerate the complement
/// exactly and, for `n <= free_check_max_n`, the detector to find no `CP_k^r`.
pub fn verify_constructions(max_n: usize, max_r: usize, free_check_max_n: usize) -> Result<VerifyReport> {
    let mut report = VerifyReport::new("constructions", "eq", &["n", "r", "k"]);
    for r in 2..=max_r {
        for k in 1..=r + 1 {
            for n in (r + k - 1).max(r)..=max_n {
                let start = Instant::now();
                let h = consecutive_family(n, r, k)?;
                let formula = closed_form_count(n, r, k)?;
                let computed = BigUint::from(h.edge_count());
                let complement = complement_enumerator(n, r, k)?;
                let bijective = complement.edge_count() + h.edge_count()
                    == crate::combinatorics::binomial_u128(n as u64, r as u64) as usize
                    && complement.edges().iter().all(|e| !h.contains_edge(e));
                let free = n > free_check_max_n || contains(&h, &Pattern::crossing_path(r, k)?)?.is_none();
                let ok = computed == formula && bijective && free;
                report.push(vec![s(n), s(r), s(k)], formula, computed, ok, start);
            }
        }
    }
    Ok(report)
}

/// Box partitions: `computed` is the total size of all boxes, `formula` is
/// `C(n, r)`; `match` also requires every r-set to lie in exactly one box and
/// every level count to respect its bound. The exactness scan runs for
/// `C(n, r) <= 200_000`.
pub fn verify_boxes(cases: &[(usize, usize)]) -> Result<VerifyReport> {
    let mut report = VerifyReport::new("boxes", "eq", &["n", "r", "boxes"]);
    for &(n, r) in cases {
        let start = Instant::now();
        let d = box_decomposition(n, r)?;
        let total: BigUint = d.levels.iter().flat_map(|l| l.boxes.iter()).map(|b| b.size()).sum();
        let formula = binomial(n as u64, r as u64);
        let exact = formula > BigUint::from(200_000u32) || (0..n).combinations(r).all(|set| d.locate(&set).len() == 1);
        let ok = total == formula && exact && d.level_bounds_hold();
        report.push(vec![s(n), s(r), s(d.box_count())], formula, total, ok, start);
    }
    Ok(report)
}

/// Seeded extraction runs: `formula` is the guaranteed ratio, `computed` the
/// achieved one; `match` requires a valid certificate and the guarantee.
pub fn verify_splitter(rs: &[usize], count: usize, seed: u64, config: &ExtractConfig) -> Result<VerifyReport> {
    let mut report = VerifyReport::new("splitter", "ge", &["r", "instance", "kind", "vertices"]);
    for &r in rs {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (r as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        for i in 0..count {
            let w = splitter_instance(r, i, &mut rng)?;
            for (kind, split) in [("bipartite", false), ("split", true)] {
                let start = Instant::now();
                let res = if split { extract_split(&w, config)? } else { extract_bipartite(&w, config)? };
                let ok = res.validate().is_ok() && res.meets_guarantee();
                report.push(
                    vec![s(r), s(i), s(kind), s(w.vertex_count())],
                    format_rational(&res.guarantee),
                    format_rational(&res.density_ratio),
                    ok,
                    start,
                );
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let report = verify_closed_form(5, 2).unwrap();
        let csv = report.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("n,r,k,formula,computed,match,ms"));
        assert!(lines.next().unwrap().starts_with("3,2,1,0,0,true,"));
        assert!(report.all_match());
        assert_eq!(report.rows.len(), 3 + 2 + 1);
    }

    #[test]
    fn partite_examples() {
        let report = verify_partite_bound(&[vec![2, 2], vec![1, 1], vec![3, 3]], 3).unwrap();
        assert!(report.all_match());
        let row = &report.rows[1];
        assert_eq!((row.formula.as_str(), row.computed.as_str()), ("8", "2"));
    }

    #[test]
    fn sizes_enumeration() {
        assert_eq!(partite_sizes(2, 3), vec![vec![1, 1], vec![1, 2], vec![2, 1]]);
        assert_eq!(partite_sizes(3, 5).len(), 1 + 3 + 6);
    }

    #[test]
    fn cyclic_examples() {
        let patterns = [Pattern::from_name("cp:2:3").unwrap(), Pattern::from_name("cm:2:2").unwrap()];
        let report = verify_cyclic_vs_linear(6, &patterns).unwrap();
        assert!(report.all_match());
        let row = report.rows.iter().find(|r| r.params[..2] == ["6".to_string(), "cp:2:3".to_string()]).unwrap();
        assert_eq!((row.formula.as_str(), row.computed.as_str()), ("9", "9"));
    }

    #[test]
    fn small_suites_pass() {
        assert!(verify_recurrence(6, 3).unwrap().all_match());
        assert!(verify_constructions(8, 3, 8).unwrap().all_match());
        assert!(verify_boxes(&[(8, 2), (9, 3)]).unwrap().all_match());
        assert!(verify_splitter(&[3], 2, 7, &ExtractConfig::default()).unwrap().all_match());
    }
}
