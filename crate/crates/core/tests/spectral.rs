mod common;

use common::graph;
use graphprop::generate::{generate, GraphModel};
use graphprop::invariants::distance::is_connected;
use graphprop::rng::{derive_seed, derived_rng};
use graphprop::spectral::{eigh, eigh_jacobi, fiedler_value, laplacian, positional_encoding, reconstruct_adjacency, EncodingMode};
use graphprop::Matrix;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn hundred_random_graphs_are_recovered() {
    for i in 0..100u64 {
        let mut rng = derived_rng(11, i);
        let n = rng.gen_range(3..=50);
        let p = rng.gen_range(0.05..0.9);
        let g = generate(GraphModel::ErdosRenyi { n, p }, derive_seed(11, i)).unwrap();
        let pe = positional_encoding(&g, EncodingMode::Full).unwrap();
        let rec = reconstruct_adjacency(&pe).unwrap();
        assert_eq!(rec.adjacency, g.adjacency());
        assert!(rec.max_deviation <= 1e-8, "deviation {}", rec.max_deviation);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigenvectors_are_orthonormal(g in graph(1, 30)) {
        let dec = eigh(&laplacian(&g.adjacency())).unwrap();
        prop_assert!(dec.orthonormality_error() <= 1e-8);
        prop_assert!(dec.max_residual(&laplacian(&g.adjacency())) <= 1e-9);
    }

    #[test]
    fn ql_and_jacobi_agree_on_the_spectrum(g in graph(1, 20)) {
        let l = laplacian(&g.adjacency());
        let a = eigh(&l).unwrap().eigenvalues;
        let b = eigh_jacobi(&l).unwrap().eigenvalues;
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
    }

    #[test]
    fn column_signs_do_not_matter(g in graph(1, 20), flips in proptest::collection::vec(any::<bool>(), 20)) {
        let pe = positional_encoding(&g, EncodingMode::Full).unwrap();
        let n = g.n();
        let flipped = Matrix::from_fn(n, n, |i, k| if flips[k] { -pe.b[(i, k)] } else { pe.b[(i, k)] });
        prop_assert!(pe.b.matmul_t(&pe.b).max_abs_diff(&flipped.matmul_t(&flipped)) <= 1e-12);
    }

    #[test]
    fn fiedler_value_detects_connectivity(g in graph(2, 20)) {
        let lambda = fiedler_value(&g).unwrap().unwrap();
        prop_assert_eq!(lambda > 1e-9, is_connected(&g));
    }

    #[test]
    fn truncated_encoding_pads_and_orders(g in graph(1, 20), d in 1usize..24) {
        let pe = positional_encoding(&g, EncodingMode::Truncated(d)).unwrap();
        prop_assert_eq!(pe.b.shape(), (g.n(), d));
        for w in pe.eigenvalues.windows(2) {
            prop_assert!(w[0] >= w[1] - 1e-12);
        }
    }
}
