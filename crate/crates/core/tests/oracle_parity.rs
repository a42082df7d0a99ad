//! Pipeline against exhaustive enumeration on random small inputs.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wisc_core::cutset::{count_with_cutsets, decompose_cutsets};
use wisc_core::generate::{
    is_claw_odd_hole_free, is_fork_odd_hole_free, lg_bipartite, module_subst, WeightMode,
};
use wisc_core::io::GraphDocument;
use wisc_core::matching::{matching_weights, WeightedBipartiteGraph};
use wisc_core::modular::{count_with_modules, extended_tree, is_module, strong_modules};
use wisc_core::oracle::{brute_matching_weight, brute_permanent, brute_weight_vector};
use wisc_core::permanent::{permanent_exact, PermanentInstance};
use wisc_core::{
    count_claw_odd_hole_free, count_fork_free, CountError, Engine, Estimate, Weight, WeightedGraph,
};

fn small_weight() -> impl Strategy<Value = Weight> {
    (1u64..=6, 1u64..=3).prop_map(|(p, q)| Weight::ratio(p, q))
}

prop_compose! {
    fn small_graph(max_n: usize)(n in 1..=max_n)
        (weights in prop::collection::vec(small_weight(), n),
         mask in prop::collection::vec(any::<bool>(), n * (n - 1) / 2),
         density in 0.0f64..1.0,
         n in Just(n)) -> WeightedGraph {
        let mut edges = Vec::new();
        let mut k = 0;
        for u in 0..n {
            for v in u + 1..n {
                // skew sparse or dense by thinning with a fixed pattern
                if mask[k] && ((u * 7 + v * 13) % 100) as f64 / 100.0 < density.max(0.2) {
                    edges.push((u, v));
                }
                k += 1;
            }
        }
        WeightedGraph::new(weights, &edges).unwrap()
    }
}

fn oracle(g: &WeightedGraph) -> Weight {
    brute_weight_vector(g).unwrap().total()
}

fn exact_oracle_counter(g: &WeightedGraph, _eps: f64) -> Result<Estimate, CountError> {
    Ok(Estimate::exact(oracle(g)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(160))]

    #[test]
    fn claw_driver_never_silently_wrong(g in small_graph(10)) {
        let engine = Engine::exact();
        match count_claw_odd_hole_free(&g, 0.0, &engine) {
            Ok(e) => prop_assert_eq!(e.value, oracle(&g)),
            Err(CountError::NotInClass { .. }) => prop_assert!(!is_claw_odd_hole_free(&g)),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn fork_driver_never_silently_wrong(g in small_graph(10)) {
        let engine = Engine::exact();
        match count_fork_free(&g, 0.0, &engine) {
            Ok(e) => prop_assert_eq!(e.value, oracle(&g)),
            Err(CountError::NotInClass { .. }) => prop_assert!(!is_fork_odd_hole_free(&g)),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn cutset_recursion_with_oracle_atoms(g in small_graph(10)) {
        for comp in g.connected_components() {
            let c = g.induced_subgraph(&comp).unwrap();
            let e = count_with_cutsets(&c, exact_oracle_counter, 0.0).unwrap();
            prop_assert_eq!(e.value, oracle(&c));
        }
    }

    #[test]
    fn cutset_pieces_cover_every_vertex(g in small_graph(10)) {
        for comp in g.connected_components() {
            let c = g.induced_subgraph(&comp).unwrap();
            let t = decompose_cutsets(&c);
            let mut seen = vec![false; c.n()];
            for &v in &t.atom(0) {
                seen[v] = true;
            }
            for i in 1..=t.h() {
                // K_i lies in what has been peeled before it
                prop_assert!(t.clique(i).iter().all(|&v| seen[v]));
                for &v in t.part(i) {
                    prop_assert!(!seen[v]);
                    seen[v] = true;
                }
            }
            for i in 1..=t.h() {
                prop_assert!(c.is_clique(t.clique(i)));
            }
            prop_assert!(seen.into_iter().all(|s| s));
        }
    }

    #[test]
    fn module_recursion_with_oracle_leaves(g in small_graph(9)) {
        let e = count_with_modules(&g, exact_oracle_counter, 0.0).unwrap();
        prop_assert_eq!(e.value, oracle(&g));
    }

    #[test]
    fn strong_modules_are_modules(g in small_graph(9)) {
        let mods = strong_modules(&g);
        for m in &mods {
            prop_assert!(is_module(&g, m));
        }
        // strong modules never overlap without nesting
        for a in &mods {
            for b in &mods {
                let common = a.iter().filter(|v| b.contains(v)).count();
                prop_assert!(common == 0 || common == a.len() || common == b.len());
            }
        }
        let steps = extended_tree(&g).steps;
        for s in &steps {
            prop_assert!(s.members.len() >= 2);
        }
    }

    #[test]
    fn documents_round_trip(g in small_graph(12)) {
        let text = GraphDocument::from_graph(&g).to_json();
        prop_assert_eq!(GraphDocument::parse(&text).unwrap().to_graph().unwrap(), g);
    }

    #[test]
    fn permanent_matches_expansion(n in 1usize..=6, cells in prop::collection::vec(0u64..=4, 36)) {
        let a = PermanentInstance::from_fn(n, |i, j| Weight::from_integer(cells[i * 6 + j]));
        prop_assert_eq!(permanent_exact(&a), brute_permanent(&a).unwrap());
    }

    #[test]
    fn matching_weights_match_enumeration(
        n1 in 1usize..=4,
        n2 in 1usize..=4,
        cells in prop::collection::vec(prop::option::weighted(0.6, small_weight()), 16),
    ) {
        let mut b = WeightedBipartiteGraph::new(n1, n2);
        for u in 0..n1 {
            for v in 0..n2 {
                if let Some(w) = &cells[u * 4 + v] {
                    b.add_edge(u, v, w.clone()).unwrap();
                }
            }
        }
        let got = matching_weights(&b, 0.0, &Engine::exact()).unwrap();
        for (k, e) in got.iter().enumerate() {
            prop_assert_eq!(&e.value, &brute_matching_weight(&b, k).unwrap());
        }
    }
}

#[test]
fn generated_line_graphs_are_exact() {
    let engine = Engine::exact();
    for seed in 0..40 {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let g = lg_bipartite(&mut r, 4 + (seed as usize % 12), WeightMode::Random);
        assert_eq!(
            count_claw_odd_hole_free(&g, 0.0, &engine).unwrap().value,
            oracle(&g),
            "seed {seed}"
        );
    }
}

#[test]
fn substituted_graphs_agree_across_drivers() {
    let engine = Engine::exact();
    for seed in 0..30 {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let g = module_subst(&mut r, 6 + seed as usize % 8, WeightMode::Random).unwrap();
        if g.n() > 18 {
            continue;
        }
        let want = oracle(&g);
        assert_eq!(
            count_fork_free(&g, 0.0, &engine).unwrap().value,
            want,
            "seed {seed}"
        );
        if let Ok(e) = count_claw_odd_hole_free(&g, 0.0, &engine) {
            assert_eq!(e.value, want, "seed {seed}");
        }
    }
}
