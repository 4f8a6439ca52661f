mod common;

use common::{close, graph, graph_and_perm};
use graphprop::invariants::oracle::oracle_compute;
use graphprop::invariants::verify::{graphs_up_to_isomorphism, verify_graphs};
use graphprop::invariants::{
    compute_all, compute_property, fit_normalizer, splittance, Registry, CLIQUE_NUMBER, FRACTIONAL_CHROMATIC_NUMBER,
    HYPER_WIENER_INDEX, INDEPENDENCE_NUMBER, LOVASZ_NUMBER, PARRY_SULLIVAN, WIENER_INDEX,
};
use graphprop::Graph;
use proptest::prelude::*;

fn value(name: &str, g: &Graph) -> Option<f64> {
    let reg = Registry::default();
    compute_property(reg.get(name).unwrap(), g, reg.lovasz_tol).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn every_property_is_relabeling_invariant((g, perm) in graph_and_perm(1, 10)) {
        let h = g.relabel(&perm).unwrap();
        let reg = Registry::default();
        let (a, b) = (compute_all(&g, &reg), compute_all(&h, &reg));
        for (i, name) in a.names.iter().enumerate() {
            let tol = if name == LOVASZ_NUMBER { 1e-3 } else { 1e-8 };
            match (a.values[i], b.values[i]) {
                (Some(x), Some(y)) => prop_assert!(close(x, y, tol), "{name}: {x} vs {y}"),
                (None, None) => {}
                other => prop_assert!(false, "{name}: {other:?}"),
            }
        }
    }

    #[test]
    fn sandwich_bounds(g in graph(1, 10)) {
        let alpha = value(INDEPENDENCE_NUMBER, &g).unwrap();
        let theta = value(LOVASZ_NUMBER, &g).unwrap();
        let chi_f = value(FRACTIONAL_CHROMATIC_NUMBER, &g.complement()).unwrap();
        prop_assert!(alpha <= theta + 1e-3, "alpha {alpha} theta {theta}");
        prop_assert!(theta <= chi_f + 1e-3, "theta {theta} chi_f {chi_f}");
        // The clique number of the complement is alpha itself.
        prop_assert_eq!(value(CLIQUE_NUMBER, &g.complement()).unwrap(), alpha);
    }

    #[test]
    fn splittance_of_complement(g in graph(1, 14)) {
        prop_assert_eq!(splittance::splittance(&g), splittance::splittance(&g.complement()));
    }

    #[test]
    fn hyper_wiener_dominates_wiener(g in graph(2, 14)) {
        if let (Some(w), Some(ww)) = (value(WIENER_INDEX, &g), value(HYPER_WIENER_INDEX, &g)) {
            prop_assert!(ww >= w);
            let has_far_pair = value("diameter", &g).unwrap() >= 2.0;
            prop_assert_eq!(ww > w, has_far_pair);
        }
    }

    #[test]
    fn parry_sullivan_matches_exact_determinant(g in graph(1, 12)) {
        let fast = value(PARRY_SULLIVAN, &g).unwrap();
        let exact = oracle_compute(PARRY_SULLIVAN, &g).unwrap().unwrap();
        prop_assert!((fast - exact).abs() <= 1e-6 * (1.0 + exact.abs()));
    }
}

#[test]
fn wiener_of_complete_graphs() {
    for n in 2..12 {
        assert_eq!(value(WIENER_INDEX, &Graph::complete(n)), Some((n * (n - 1) / 2) as f64));
    }
}

#[test]
fn known_values() {
    let c5 = Graph::cycle(5);
    assert!((value(LOVASZ_NUMBER, &c5).unwrap() - 5f64.sqrt()).abs() <= 1e-3);
    assert_eq!(value(FRACTIONAL_CHROMATIC_NUMBER, &c5), Some(2.5));
    for n in 1..8 {
        assert!((value(LOVASZ_NUMBER, &Graph::complete(n)).unwrap() - 1.0).abs() <= 1e-3);
    }
    assert_eq!(oracle_compute(INDEPENDENCE_NUMBER, &c5).unwrap(), Some(2.0));
    assert_eq!(oracle_compute(FRACTIONAL_CHROMATIC_NUMBER, &c5).unwrap(), Some(2.5));
}

#[test]
fn all_six_node_graphs_including_disconnected() {
    // Inapplicability must agree with the oracles as well.
    let graphs = graphs_up_to_isomorphism(6);
    assert_eq!(graphs.len(), 156);
    let report = verify_graphs(&graphs, &Registry::default());
    assert!(report.passed(), "{:?}", report.mismatches.first());
}

#[test]
fn normalization_of_a_corpus_is_standard() {
    let reg = Registry::default();
    let graphs: Vec<Graph> = (3..12).map(Graph::cycle).chain((3..9).map(Graph::complete)).collect();
    let vectors: Vec<_> = graphs.iter().map(|g| compute_all(g, &reg)).collect();
    let stats = fit_normalizer(&vectors).unwrap();
    let z: Vec<_> = vectors.iter().map(|v| stats.apply(v)).collect();
    for (k, s) in stats.properties.iter().enumerate() {
        let col: Vec<f64> = z.iter().filter_map(|v| v.values[k]).collect();
        let mean = col.iter().sum::<f64>() / col.len() as f64;
        assert!(mean.abs() < 1e-9, "{}", s.name);
        for (raw, norm) in vectors.iter().zip(&z) {
            let r = raw.values[raw.index_of(&s.name).unwrap()];
            if let (Some(r), Some(n)) = (r, norm.values[k]) {
                assert!(close(stats.denormalize(&s.name, n).unwrap(), r, 1e-12));
            }
        }
    }
}
