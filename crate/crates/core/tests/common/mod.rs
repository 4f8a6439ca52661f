#![allow(dead_code)]

use graphprop::Graph;
use proptest::prelude::*;

/// Simple graph on `min_n..=max_n` nodes, each pair present with
/// probability about `density`.
pub fn graph(min_n: usize, max_n: usize) -> impl Strategy<Value = Graph> {
    (min_n..=max_n, 0.0f64..1.0).prop_flat_map(|(n, density)| {
        let pairs = n * (n.max(1) - 1) / 2;
        proptest::collection::vec(proptest::bool::weighted(density.clamp(0.05, 0.95)), pairs).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut k = 0;
            for i in 0..n {
                for j in (i + 1)..n {
                    if bits[k] {
                        edges.push((i, j));
                    }
                    k += 1;
                }
            }
            Graph::new("arb", "arb", n, edges).unwrap()
        })
    })
}

/// Graph together with a random relabeling of its nodes.
pub fn graph_and_perm(min_n: usize, max_n: usize) -> impl Strategy<Value = (Graph, Vec<usize>)> {
    graph(min_n, max_n).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}
