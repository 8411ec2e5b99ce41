use proptest::prelude::*;
use rumorgame::emergence::{
    build_initiated_graph, build_regular_graph, fit_power_law, prune_edges, run_emergence, DegreeHistogram,
    EmergenceConfig, FriendshipGraph, PruneRule,
};
use rumorgame::engine::PopulationSpec;
use rumorgame::TraitVector;
use std::collections::BTreeSet;

fn simple(g: &FriendshipGraph) -> bool {
    let mut seen = BTreeSet::new();
    g.edges()
        .iter()
        .all(|e| e.a < e.b && e.b < g.node_count() && seen.insert((e.a, e.b)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn regular_graphs_are_simple_and_regular(n in 4usize..80, d in 1usize..12, seed in any::<u64>()) {
        prop_assume!(d < n && (n * d) % 2 == 0);
        let g = build_regular_graph(n, d, seed).unwrap();
        prop_assert!(simple(&g));
        prop_assert!(g.degrees().iter().all(|&x| x == d));
        prop_assert_eq!(g.edge_count(), n * d / 2);
    }

    #[test]
    fn initiated_graphs_respect_minimum_degree(n in 3usize..60, per in 1usize..5, seed in any::<u64>()) {
        prop_assume!(per < n);
        let g = build_initiated_graph(n, per, seed).unwrap();
        prop_assert!(simple(&g));
        prop_assert!(g.degrees().iter().all(|&x| x >= per));
    }

    #[test]
    fn pruning_only_removes(
        n in 6usize..40,
        utils in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 0..100),
        rule in prop_oneof![Just(PruneRule::Either), Just(PruneRule::Both), Just(PruneRule::Sum)],
    ) {
        let g = build_regular_graph(n, 2, 1).unwrap();
        let mut edges: Vec<_> = g.edges().to_vec();
        for (e, (ua, ub)) in edges.iter_mut().zip(utils.iter().cycle()) {
            e.utility_a = *ua;
            e.utility_b = *ub;
        }
        let played = FriendshipGraph::from_edges(n, edges.clone()).unwrap();
        let expected = edges.iter().filter(|e| rule.severs(e.utility_a, e.utility_b)).count();
        let before = played.edge_count();
        let mut pruned = played.clone();
        let removed = prune_edges(&mut pruned, rule);
        prop_assert_eq!(before, pruned.edge_count() + removed);
        prop_assert_eq!(removed, expected);
        prop_assert!(pruned.edges().iter().all(|e| played.edges().iter().any(|f| f.a == e.a && f.b == e.b)));
        prop_assert_eq!(pruned.degree_histogram().total(), n);
    }

    #[test]
    fn exact_power_laws_are_recovered(alpha in 0.2..3.5f64, scale in 1e3..1e6f64) {
        let hist = DegreeHistogram::from_counts(
            (5..=24).map(|d| (d, (scale * (d as f64).powf(-alpha)).round().max(1.0) as usize)),
        );
        let fit = fit_power_law(&hist, 5, 24).unwrap();
        prop_assert!(fit.exponent < 0.0);
        prop_assert!((fit.exponent + alpha).abs() < 0.1 || scale * 24f64.powf(-alpha) < 20.0);
    }
}

#[test]
fn emergence_is_reproducible_and_shrinks() {
    let graph = build_regular_graph(120, 6, 9).unwrap();
    let spec = PopulationSpec {
        n_actors: 120,
        traits: TraitVector::EXPERT,
        seed: 9,
        ..PopulationSpec::default()
    };
    let config = EmergenceConfig::default();
    let a = run_emergence(&graph, &spec, &config).unwrap();
    let b = run_emergence(&graph, &spec, &config).unwrap();
    assert_eq!(a, b);
    let mut edges = graph.edge_count();
    for r in &a {
        assert_eq!(r.played.edge_count(), edges);
        assert_eq!(r.graph.edge_count() + r.removed, edges);
        edges = r.graph.edge_count();
    }
}
