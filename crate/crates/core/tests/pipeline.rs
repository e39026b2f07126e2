use std::collections::HashSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use symprep::fixtures;
use symprep::graph::{apply_permutation, build_graph};
use symprep::io::{parse_dimacs, write_dimacs};
use symprep::perm::compose;
use symprep::refinement::{is_equitable, refine_graph};
use symprep::solver::{brute_force_aut, group_closure, ir_solve, DEFAULT_CLOSURE_CAP};
use symprep::{preprocess, reconstruct_group, Coloring, ColoredGraph, ScheduleConfig, SparseAutomorphism};

fn graph_strategy(max_n: usize) -> impl Strategy<Value = ColoredGraph> {
    (1..=max_n, 0.0f64..1.0, 1usize..=3, any::<u64>()).prop_map(|(n, p, k, seed)| {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let g = fixtures::gnp(n, p, &mut r);
        fixtures::random_colors(&g, k, &mut r)
    })
}

fn full_group(g: &ColoredGraph, cfg: &ScheduleConfig) -> HashSet<Vec<usize>> {
    let report = preprocess(g, cfg);
    let reduced_gens = ir_solve(&report.reduced, &Coloring::of_graph(&report.reduced));
    let gens = reconstruct_group(&report, &reduced_gens).unwrap();
    for s in &gens {
        assert!(s.is_automorphism_of(g));
    }
    group_closure(&gens, g.n(), DEFAULT_CLOSURE_CAP).unwrap()
}

fn oracle(g: &ColoredGraph) -> HashSet<Vec<usize>> {
    brute_force_aut(g, 10).unwrap().into_iter().collect()
}

fn ablations() -> Vec<ScheduleConfig> {
    let d = ScheduleConfig::default();
    vec![
        d.clone(),
        ScheduleConfig::none(),
        ScheduleConfig { deg0: false, deg1: false, ..d.clone() },
        ScheduleConfig { probe_1ir: false, probe_size2: false, probe_size_b: false, ..d.clone() },
        ScheduleConfig { components: false, edge_flip: false, ..d },
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn reconstructed_group_matches_brute_force(g in graph_strategy(9)) {
        let expected = oracle(&g);
        for cfg in ablations() {
            prop_assert_eq!(&full_group(&g, &cfg), &expected);
        }
    }

    #[test]
    fn reduced_coloring_is_equitable(g in graph_strategy(14)) {
        let report = preprocess(&g, &ScheduleConfig::default());
        prop_assert!(is_equitable(&report.reduced, &Coloring::of_graph(&report.reduced)));
        prop_assert!(report.repr.validate().is_ok());
        prop_assert_eq!(report.counters.vertices_removed(), g.n() - report.reduced.n());
    }

    #[test]
    fn refinement_is_equivariant(g in graph_strategy(14), seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let perm = fixtures::random_permutation(g.n(), &mut r);
        let h = apply_permutation(&g, &perm).unwrap();
        let (pg, ph) = (refine_graph(&g), refine_graph(&h));
        prop_assert_eq!(pg.signature(), ph.signature());
        for c in pg.cells() {
            let mut mapped: Vec<usize> = pg.cell(c).iter().map(|&v| perm[v]).collect();
            let mut target = ph.cell(c).to_vec();
            mapped.sort_unstable();
            target.sort_unstable();
            prop_assert_eq!(mapped, target);
        }
    }

    #[test]
    fn compose_agrees_with_dense_composition(n in 1usize..40, s1 in any::<u64>(), s2 in any::<u64>()) {
        let a = fixtures::random_permutation(n, &mut ChaCha8Rng::seed_from_u64(s1));
        let b = fixtures::random_permutation(n, &mut ChaCha8Rng::seed_from_u64(s2));
        let c = compose(&SparseAutomorphism::from_full(&a), &SparseAutomorphism::from_full(&b));
        let dense: Vec<usize> = (0..n).map(|x| a[b[x]]).collect();
        prop_assert_eq!(c.to_full(n), dense);
    }

    #[test]
    fn dimacs_round_trip(g in graph_strategy(30)) {
        let text = write_dimacs(&g);
        prop_assert_eq!(parse_dimacs(&text).unwrap(), g);
    }
}

#[test]
fn preprocessing_is_deterministic() {
    for g in fixtures::small_corpus(11) {
        let a = preprocess(&g, &ScheduleConfig::default());
        let b = preprocess(&g, &ScheduleConfig::default());
        assert_eq!(a.reduced, b.reduced);
        assert_eq!(a.kernel, b.kernel);
        assert_eq!(a.probe_gens, b.probe_gens);
        assert_eq!(a.counters, b.counters);
    }
}

#[test]
fn colored_gadgets_keep_their_groups() {
    // a bundle of leaves where one leaf is colored apart
    let g = build_graph(5, &[(0, 1), (0, 2), (0, 3), (0, 4)], &[0, 1, 1, 1, 2]).unwrap();
    assert_eq!(full_group(&g, &ScheduleConfig::default()).len(), 6);
    let g = fixtures::disjoint_union(&fixtures::star(3), &fixtures::cycle(5), false);
    assert_eq!(full_group(&g, &ScheduleConfig::default()), oracle(&g));
}
