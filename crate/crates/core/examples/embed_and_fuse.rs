//! Trains a small encoder, embeds graphs, and concatenates node
//! embeddings with external node features.
//!
//! `cargo run --release --example embed_and_fuse -- [graphs] [epochs]`

use graphprop::augment::{build_synthetic_corpus, default_synthetic_specs};
use graphprop::invariants::Registry;
use graphprop::linalg::{norm, Matrix};
use graphprop::model::{fuse, train, EncoderModel, TrainConfig};
use graphprop::Graph;

fn main() -> graphprop::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse().expect("numeric argument")).collect();
    let graphs = args.first().copied().unwrap_or(300);
    let epochs = args.get(1).copied().unwrap_or(20);

    let corpus = build_synthetic_corpus(&default_synthetic_specs(graphs, 8, 16, 0))?;
    let registry = Registry::select(&["edge_count", "diameter", "wiener_index", "splittance", "fiedler_value"])?;
    let config = TrainConfig {
        epochs,
        ..TrainConfig::default()
    };
    let model = train(&corpus, &registry, &config)?.model;

    // Round trip through the JSON model file.
    let model = EncoderModel::from_json(&model.to_json()?)?;

    let empty = model.embed(&Graph::empty(6))?;
    let complete = model.embed(&Graph::complete(6))?;
    let gap: Vec<f64> = empty.graph.iter().zip(&complete.graph).map(|(a, b)| a - b).collect();
    println!("graph embedding width {}", empty.graph.len());
    println!("distance between empty and complete K6 embeddings: {:.4}", norm(&gap));

    let g = Graph::petersen();
    for (name, value) in model.predict_properties(&g)? {
        println!("  predicted {name:<14} {value:.3}");
    }

    // Two external features per node, e.g. from a text encoder.
    let e = Matrix::from_fn(g.n(), 2, |i, j| if j == 0 { i as f64 } else { 1.0 });
    let z = model.embed(&g)?.nodes;
    let x = fuse(&z, &e)?;
    println!("fused node matrix {}x{} (2 feature columns + {} embedding columns)", x.rows(), x.cols(), z.cols());
    Ok(())
}
