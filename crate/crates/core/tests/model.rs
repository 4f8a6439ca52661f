mod common;

use common::graph_and_perm;
use graphprop::augment::{build_synthetic_corpus, default_synthetic_specs};
use graphprop::invariants::Registry;
use graphprop::model::{forward, fuse, loss_and_gradient, train, ArchConfig, EncoderModel, LossWeights, Params, Readout, Targets, TrainConfig};
use graphprop::rng::rng_from_seed;
use graphprop::spectral::{eigh, laplacian};
use graphprop::{Graph, Matrix};
use proptest::prelude::*;
use rand::Rng;
use std::sync::OnceLock;

fn arch(layers: usize, readout: Readout) -> ArchConfig {
    ArchConfig {
        d_in: 4,
        d_model: 6,
        layers,
        heads: 3,
        readout,
        graph_outputs: 3,
        node_outputs: 2,
        pair_outputs: 2,
    }
}

fn permute_rows(m: &Matrix, perm: &[usize]) -> Matrix {
    // Row i of the input becomes row perm[i].
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    Matrix::from_fn(m.rows(), m.cols(), |r, c| m[(inv[r], c)])
}

fn small_model() -> &'static EncoderModel {
    static MODEL: OnceLock<EncoderModel> = OnceLock::new();
    MODEL.get_or_init(|| {
        let corpus = build_synthetic_corpus(&default_synthetic_specs(30, 6, 10, 3)).unwrap();
        train(&corpus, &Registry::default(), &small_config()).unwrap().model
    })
}

fn small_config() -> TrainConfig {
    TrainConfig {
        epochs: 2,
        d_in: 6,
        d_model: 8,
        layers: 1,
        heads: 2,
        seed: 5,
        ..TrainConfig::default()
    }
}

/// Laplacian eigenvalues pairwise separated and no eigenvector whose
/// largest-magnitude entries tie with opposite signs, so independent
/// decompositions pick the same signs.
fn well_separated(g: &Graph) -> bool {
    let dec = eigh(&laplacian(&g.adjacency())).unwrap();
    let distinct = dec.eigenvalues.windows(2).all(|w| (w[1] - w[0]).abs() > 1e-6);
    let n = g.n();
    let clear_sign = (0..n).all(|k| {
        let col: Vec<f64> = (0..n).map(|i| dec.eigenvectors[(i, k)]).collect();
        let peak = col.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let near: Vec<f64> = col.into_iter().filter(|v| v.abs() > peak - 1e-6).collect();
        near.iter().all(|v| v.signum() == near[0].signum())
    });
    distinct && clear_sign
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn forward_is_permutation_equivariant(layers in 0usize..3, size in any::<bool>(), seed in any::<u64>(), perm in Just((0..7).collect::<Vec<usize>>()).prop_shuffle()) {
        let readout = if size { Readout::MeanAndSize } else { Readout::Mean };
        let a = arch(layers, readout);
        let mut rng = rng_from_seed(seed);
        let p = Params::init(&a, &mut rng).unwrap();
        let b = Matrix::from_fn(7, 4, |_, _| rng.gen_range(-1.0..1.0));
        let x = forward(&p, &a, &b).unwrap();
        let y = forward(&p, &a, &permute_rows(&b, &perm)).unwrap();
        for (u, v) in x.graph.iter().zip(&y.graph) {
            prop_assert!((u - v).abs() <= 1e-9);
        }
        prop_assert!(permute_rows(&x.node, &perm).max_abs_diff(&y.node) <= 1e-9);
        for (q, r) in x.pair.iter().zip(&y.pair) {
            prop_assert!(q.is_symmetric(0.0));
            for i in 0..7 {
                for j in 0..7 {
                    prop_assert!((q[(i, j)] - r[(perm[i], perm[j])]).abs() <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn loss_is_the_weighted_sum_of_head_losses(layers in 0usize..3, seed in any::<u64>(), wg in 0.0f64..2.0, wn in 0.0f64..2.0, wp in 0.0f64..2.0) {
        let a = arch(layers, Readout::Mean);
        let mut rng = rng_from_seed(seed);
        let p = Params::init(&a, &mut rng).unwrap();
        let n = 5;
        let b = Matrix::from_fn(n, 4, |_, _| rng.gen_range(-1.0..1.0));
        let t = Targets {
            graph: vec![Some(0.3), None, Some(-1.2)],
            node: Matrix::from_fn(n, 2, |_, _| rng.gen_range(-1.0..1.0)),
            node_defined: vec![true, false],
            pair: vec![Matrix::from_fn(n, n, |i, j| (i + j) as f64 / 4.0), Matrix::zeros(n, n)],
            pair_defined: vec![(0..n * n).map(|k| k % 3 != 0).collect(), vec![false; n * n]],
        };
        let w = LossWeights { graph: wg, node: wn, pair: wp };
        let (parts, _) = loss_and_gradient(&p, &a, &b, &t, &w).unwrap();

        let pred = forward(&p, &a, &b).unwrap();
        let graph: f64 = [0, 2].iter().map(|&k| (pred.graph[k] - t.graph[k].unwrap()).powi(2)).sum();
        let node = (0..n).map(|i| (pred.node[(i, 0)] - t.node[(i, 0)]).powi(2)).sum::<f64>() / n as f64;
        let mut pair_sum = 0.0;
        let mut pair_count = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j && (i * n + j) % 3 != 0 {
                    pair_sum += (pred.pair[0][(i, j)] - t.pair[0][(i, j)]).powi(2);
                    pair_count += 1.0;
                }
            }
        }
        let expected = wg * graph + wn * node + wp * pair_sum / pair_count;
        prop_assert!((parts.total() - expected).abs() <= 1e-12 * (1.0 + expected));
    }

    #[test]
    fn trained_model_is_invariant_to_relabeling((g, perm) in graph_and_perm(3, 12)) {
        prop_assume!(well_separated(&g));
        let model = small_model();
        let h = g.relabel(&perm).unwrap();
        let (x, y) = (model.predict_normalized(&g).unwrap(), model.predict_normalized(&h).unwrap());
        for (u, v) in x.iter().zip(&y) {
            prop_assert!((u - v).abs() <= 1e-9, "{x:?} vs {y:?}");
        }
        let (ex, ey) = (model.embed(&g).unwrap(), model.embed(&h).unwrap());
        prop_assert!(permute_rows(&ex.nodes, &perm).max_abs_diff(&ey.nodes) <= 1e-9);
    }

    #[test]
    fn fusion_commutes_with_row_permutation(perm in Just((0..6).collect::<Vec<usize>>()).prop_shuffle(), width in 0usize..4) {
        let z = Matrix::from_fn(6, 3, |i, j| (i * 3 + j) as f64);
        let e = Matrix::from_fn(6, width, |i, j| -((i + j) as f64));
        let x = fuse(&z, &e).unwrap();
        let y = fuse(&permute_rows(&z, &perm), &permute_rows(&e, &perm)).unwrap();
        prop_assert_eq!(permute_rows(&x, &perm), y);
    }
}

#[test]
fn model_file_round_trips_bitwise() {
    let model = small_model();
    let text = model.to_json().unwrap();
    let back = EncoderModel::from_json(&text).unwrap();
    assert_eq!(back.to_json().unwrap(), text);
    let g = Graph::petersen();
    let (a, b) = (model.predict_normalized(&g).unwrap(), back.predict_normalized(&g).unwrap());
    assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
}

#[test]
fn training_is_deterministic() {
    let corpus = build_synthetic_corpus(&default_synthetic_specs(30, 6, 10, 3)).unwrap();
    let again = train(&corpus, &Registry::default(), &small_config()).unwrap().model;
    assert_eq!(again.to_json().unwrap(), small_model().to_json().unwrap());
}

#[test]
fn zero_predictor_loss_counts_targets() {
    // With every output weight and bias at zero, each unit-magnitude graph
    // target contributes exactly one.
    let a = arch(1, Readout::Mean);
    let p = Params::zeros(&a);
    let b = Matrix::from_fn(4, 4, |i, j| (i as f64 - j as f64) / 3.0);
    let t = Targets::graph_only(vec![Some(1.0), Some(-1.0), Some(1.0)], 4);
    let w = LossWeights { graph: 1.0, node: 0.0, pair: 0.0 };
    let (parts, _) = loss_and_gradient(&p, &a, &b, &t, &w).unwrap();
    assert!((parts.total() - 3.0).abs() <= 1e-12);
}

#[test]
fn unsupported_model_format_is_rejected() {
    let text = small_model().to_json().unwrap().replace("graphprop-encoder/1", "graphprop-encoder/9");
    assert!(EncoderModel::from_json(&text).is_err());
}
