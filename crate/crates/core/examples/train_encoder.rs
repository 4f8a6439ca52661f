//! Trains the structural encoder on the default three-family synthetic
//! corpus and prints per-epoch losses and final validation R².
//!
//! cargo run --release --example train_encoder -- [graphs] [epochs] [seed] [mean|mean-and-size]

use std::time::Instant;

use graphprop::augment::{build_synthetic_corpus, default_synthetic_specs};
use graphprop::invariants::Registry;
use graphprop::model::{train, Readout, TrainConfig};

fn main() -> graphprop::Result<()> {
    env_logger::init();
    let raw: Vec<String> = std::env::args().skip(1).collect();
    let readout = match raw.get(3).map(String::as_str) {
        None | Some("mean") => Readout::Mean,
        Some("mean-and-size") => Readout::MeanAndSize,
        Some(other) => panic!("unknown readout `{other}`"),
    };
    let args: Vec<u64> = raw.iter().take(3).map(|a| a.parse().expect("numeric argument")).collect();
    let graphs = args.first().copied().unwrap_or(2000) as usize;
    let epochs = args.get(1).copied().unwrap_or(50) as usize;
    let seed = args.get(2).copied().unwrap_or(0);

    let corpus = build_synthetic_corpus(&default_synthetic_specs(graphs, 8, 24, seed))?;
    let config = TrainConfig {
        epochs,
        seed,
        readout,
        ..TrainConfig::default()
    };
    let start = Instant::now();
    let outcome = train(&corpus, &Registry::default(), &config)?;
    println!("trained in {:.1}s", start.elapsed().as_secs_f64());
    for m in outcome.log.iter().filter(|m| m.split == "train") {
        println!("epoch {:>3} train loss {:.4}", m.epoch, m.loss);
    }
    let last = outcome.log.iter().rev().find(|m| m.split == "validation").expect("validation split");
    for (name, r2) in outcome.model.graph_properties.iter().zip(&last.r2) {
        println!("{name:<28} validation R² {r2:.3}");
    }
    Ok(())
}
