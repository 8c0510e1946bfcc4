use std::collections::HashSet;

use itertools::Itertools;
use num_bigint::BigUint;
use ohx_core::combinatorics::colex_cmp;
use ohx_core::format::{parse_any, parse_ohx, to_json, to_ohx, weighted_to_json};
use ohx_core::patterns::{
    contains, contains_bruteforce, crossing_path_positions, greedy_crossing_path, partite_path_bound,
    validate_embedding, HostParts, Interval,
};
use ohx_core::random::{random_hypergraph, random_pattern, random_weighted};
use ohx_core::search::{max_pattern_free, SolverConfig};
use ohx_core::splitter::{extract_bipartite, extract_split, ExtractConfig};
use ohx_core::{Edge, Hypergraph, Mode, Pattern};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn mode_of(cyclic: bool) -> Mode {
    if cyclic {
        Mode::Cyclic
    } else {
        Mode::Linear
    }
}

/// Edge sets of all copies of `p` in the complete graph on `0..n`, written
/// as bitmasks over `edges`.
fn copy_masks(n: usize, p: &Pattern, edges: &[Edge]) -> Vec<u32> {
    let v = p.vertex_count();
    let shifts = if p.mode() == Mode::Cyclic { v } else { 1 };
    let mut out = Vec::new();
    for s in (0..n).combinations(v) {
        for shift in 0..shifts {
            let mut mask = 0u32;
            for e in p.edges() {
                let mut img: Edge = e.iter().map(|&q| s[(q + shift) % v]).collect();
                img.sort_unstable();
                mask |= 1 << edges.iter().position(|f| *f == img).unwrap();
            }
            out.push(mask);
        }
    }
    out
}

/// Exhaustive maximum over all edge subsets, ties broken towards the subset
/// whose lowest differing colex edge is present.
fn exhaustive(n: usize, r: usize, p: &Pattern) -> (usize, Vec<Edge>) {
    let mut edges: Vec<Edge> = (0..n).combinations(r).collect();
    edges.sort_by(|a, b| colex_cmp(a, b));
    let copies = copy_masks(n, p, &edges);
    let m = edges.len();
    let mut best: Option<u32> = None;
    for mask in 0..(1u32 << m) {
        if copies.iter().any(|&c| c & !mask == 0) {
            continue;
        }
        best = Some(match best {
            None => mask,
            Some(b) => {
                let (cb, cm) = (b.count_ones(), mask.count_ones());
                let diff = b ^ mask;
                if cm > cb || (cm == cb && diff != 0 && mask & (diff & diff.wrapping_neg()) != 0) {
                    mask
                } else {
                    b
                }
            }
        });
    }
    let best = best.unwrap();
    let mut witness: Vec<Edge> = (0..m).filter(|&i| best & (1 << i) != 0).map(|i| edges[i].clone()).collect();
    witness.sort();
    (best.count_ones() as usize, witness)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn text_formats_round_trip(seed in any::<u64>(), n in 3usize..12, r in 2usize..4, cyclic in any::<bool>()) {
        let h = random_hypergraph(n.max(r), r, mode_of(cyclic), 0.4, &mut rng(seed)).unwrap();
        prop_assert_eq!(&parse_ohx(&to_ohx(&h)).unwrap(), &h);
        prop_assert_eq!(&parse_any(&to_json(&h)).unwrap().to_hypergraph().unwrap(), &h);
        let w = random_weighted(n.max(r), r, 10, 7, &mut rng(seed)).unwrap();
        prop_assert_eq!(parse_any(&weighted_to_json(&w)).unwrap().to_weighted().unwrap(), w);
    }

    #[test]
    fn shadow_is_the_down_closure(seed in any::<u64>(), n in 4usize..10, r in 2usize..5) {
        let h = random_hypergraph(n.max(r), r, Mode::Linear, 0.3, &mut rng(seed)).unwrap();
        let s = h.shadow().unwrap();
        let expected: HashSet<Edge> = h.edges().iter().flat_map(|e| e.iter().copied().combinations(r - 1)).collect();
        let got: HashSet<Edge> = s.edges().iter().cloned().collect();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn detector_matches_brute_force(
        seed in any::<u64>(), n in 3usize..9, r in 2usize..4, v_extra in 0usize..3, m in 1usize..4,
        p in 0.1f64..0.9, cyclic in any::<bool>(),
    ) {
        let mode = mode_of(cyclic);
        let mut g = rng(seed);
        let host = random_hypergraph(n.max(r), r, mode, p, &mut g).unwrap();
        let pattern = random_pattern(r + v_extra, r, m, mode, &mut g).unwrap();
        let fast = contains(&host, &pattern).unwrap();
        let slow = contains_bruteforce(&host, &pattern, 12).unwrap();
        prop_assert_eq!(fast.is_some(), slow.is_some());
        if let Some(emb) = fast {
            prop_assert!(validate_embedding(&host, &pattern, &emb).is_ok());
        }
    }

    #[test]
    fn crossing_path_prefixes_embed(r in 2usize..5, k in 1usize..6, j in 1usize..6) {
        let j = j.min(k);
        let big = Pattern::crossing_path(r, k).unwrap().to_hypergraph();
        prop_assert!(contains(&big, &Pattern::crossing_path(r, j).unwrap()).unwrap().is_some());
    }

    #[test]
    fn greedy_finds_paths_above_the_bound(seed in any::<u64>(), a in 2usize..7, b in 2usize..7, k in 1usize..4) {
        let sizes = [a, b];
        let bound = partite_path_bound(&sizes, k);
        let all: Vec<Edge> = (0..a).cartesian_product(a..a + b).map(|(x, y)| vec![x, y]).collect();
        let mut g = rng(seed);
        let take = (u64::try_from(&bound).unwrap() as usize + 1).min(all.len());
        let chosen = rand::seq::index::sample(&mut g, all.len(), take).into_iter().map(|i| all[i].clone());
        let h = Hypergraph::new(a + b, 2, Mode::Linear, chosen).unwrap();
        let parts = HostParts::Coloring(vec![Interval::new(0, a), Interval::new(a, b)]);
        let found = greedy_crossing_path(&h, &parts, k).unwrap();
        if BigUint::from(h.edge_count()) > bound {
            let path = found.expect("above the bound a path must be found");
            let pos = crossing_path_positions(2, k);
            for i in 0..k {
                let mut e = vec![path[i], path[i + 1]];
                e.sort_unstable();
                prop_assert!(h.contains_edge(&e));
            }
            for (x, y) in (0..path.len()).tuple_combinations() {
                prop_assert_eq!(path[x] < path[y], pos[x] < pos[y]);
            }
        }
    }

    #[test]
    fn extraction_meets_guarantees(seed in any::<u64>(), r in 3usize..6, n in 6usize..40, m in 1usize..60, base in 4usize..12) {
        let w = random_weighted(n.max(r + 1), r, m, 9, &mut rng(seed)).unwrap();
        let config = ExtractConfig { base_threshold: Some(base.max(r)) };
        for res in [extract_bipartite(&w, &config).unwrap(), extract_split(&w, &config).unwrap()] {
            prop_assert!(res.validate().is_ok());
            prop_assert!(res.meets_guarantee());
            prop_assert!(res.subgraph.edges().iter().all(|e| w.weight(e) > num_rational::BigRational::from_integer(0.into())));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn solver_matches_exhaustive_search(seed in any::<u64>(), small in any::<bool>(), m in 1usize..4, cyclic in any::<bool>()) {
        let (n, r) = if small { (6, 2) } else { (6, 3) };
        let mode = mode_of(cyclic);
        let pattern = random_pattern(r + 2, r, m, mode, &mut rng(seed)).unwrap();
        let (value, witness) = exhaustive(n, r, &pattern);
        for depth in [0, 4] {
            let config = SolverConfig { split_depth: depth, ..SolverConfig::default() };
            let res = max_pattern_free(n, r, &pattern, mode, &config).unwrap();
            prop_assert!(res.proved_optimal);
            prop_assert_eq!(res.value, value);
            prop_assert_eq!(res.witness.edges(), &witness[..]);
            prop_assert!(contains_bruteforce(&res.witness, &pattern, 12).unwrap().is_none());
        }
    }
}

#[test]
fn solver_values_are_monotone_in_n() {
    let config = SolverConfig::default();
    for (r, name, max_n) in [(2, "cp:2:3", 9), (2, "cm:2:2", 9), (3, "cp:3:2", 7), (3, "cp:3:5", 7)] {
        for mode in [Mode::Linear, Mode::Cyclic] {
            let p = Pattern::from_name(name).unwrap();
            let values: Vec<usize> =
                (r + 1..=max_n).map(|n| max_pattern_free(n, r, &p, mode, &config).unwrap().value).collect();
            assert!(values.windows(2).all(|w| w[0] <= w[1]), "{name} {mode}: {values:?}");
        }
    }
}

#[test]
fn seeded_and_unseeded_runs_agree() {
    for (n, r, name, mode) in
        [(9, 2, "cp:2:3", Mode::Cyclic), (8, 3, "cp:3:4", Mode::Linear), (8, 3, "cm:3:2", Mode::Cyclic)]
    {
        let p = Pattern::from_name(name).unwrap();
        let plain = max_pattern_free(n, r, &p, mode, &SolverConfig::default()).unwrap();
        let seeded = SolverConfig { seed_construction: true, ..SolverConfig::default() };
        let seeded = max_pattern_free(n, r, &p, mode, &seeded).unwrap();
        assert!(seeded.seed_value.is_some());
        assert_eq!(plain.value, seeded.value);
        assert_eq!(plain.witness, seeded.witness);
    }
}
