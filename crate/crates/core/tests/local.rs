mod common;

use common::graph_and_perm;
use graphprop::invariants::verify::graphs_up_to_isomorphism;
use graphprop::invariants::{compute_property, Registry, WIENER_INDEX};
use graphprop::local::{betweenness_centrality, node_property, pair_property, shortest_path_matrix, NODE_PROPERTIES, PAIR_PROPERTIES};
use graphprop::Graph;
use proptest::prelude::*;

/// Betweenness by listing every shortest path explicitly.
fn betweenness_by_paths(g: &Graph) -> Vec<f64> {
    let n = g.n();
    let mut through = vec![0.0; n];
    for s in 0..n {
        for t in (s + 1)..n {
            let mut paths: Vec<Vec<usize>> = Vec::new();
            // Breadth-first growth of all simple paths until t is reached.
            let mut frontier = vec![vec![s]];
            while paths.is_empty() && !frontier.is_empty() {
                let mut next = Vec::new();
                for p in &frontier {
                    for &w in g.neighbors(*p.last().unwrap()) {
                        if p.contains(&w) {
                            continue;
                        }
                        let mut q = p.clone();
                        q.push(w);
                        if w == t {
                            paths.push(q);
                        } else {
                            next.push(q);
                        }
                    }
                }
                frontier = next;
            }
            if paths.is_empty() {
                continue;
            }
            let share = 1.0 / paths.len() as f64;
            for p in &paths {
                for &v in &p[1..p.len() - 1] {
                    through[v] += share;
                }
            }
        }
    }
    through
}

#[test]
fn brandes_matches_path_enumeration_on_all_graphs_up_to_eight_nodes() {
    let mut checked = 0;
    for n in 1..=8 {
        for g in graphs_up_to_isomorphism(n) {
            let fast = betweenness_centrality(&g).values;
            let slow = betweenness_by_paths(&g);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() <= 1e-9, "{:?}: {fast:?} vs {slow:?}", g.edges());
            }
            checked += 1;
        }
    }
    assert_eq!(checked, 1 + 2 + 4 + 11 + 34 + 156 + 1044 + 12346);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shortest_paths_sum_to_wiener((g, _) in graph_and_perm(2, 16)) {
        let reg = Registry::default();
        if let Some(w) = compute_property(reg.get(WIENER_INDEX).unwrap(), &g, reg.lovasz_tol).unwrap() {
            let d = shortest_path_matrix(&g);
            prop_assert_eq!(d.values.as_slice().iter().sum::<f64>() / 2.0, w);
        }
    }

    #[test]
    fn local_properties_are_equivariant((g, perm) in graph_and_perm(1, 14)) {
        let h = g.relabel(&perm).unwrap();
        for name in NODE_PROPERTIES {
            let (a, b) = (node_property(&g, name).unwrap(), node_property(&h, name).unwrap());
            prop_assert_eq!(a.masked, b.masked);
            for v in 0..g.n() {
                prop_assert!((a.values[v] - b.values[perm[v]]).abs() <= 1e-12, "{}", name);
            }
        }
        for name in PAIR_PROPERTIES {
            let (a, b) = (pair_property(&g, name).unwrap(), pair_property(&h, name).unwrap());
            for u in 0..g.n() {
                for v in 0..g.n() {
                    prop_assert_eq!(a.is_defined(u, v), b.is_defined(perm[u], perm[v]));
                    if a.is_defined(u, v) {
                        prop_assert_eq!(a.values[(u, v)], b.values[(perm[u], perm[v])]);
                    }
                }
            }
        }
    }
}
