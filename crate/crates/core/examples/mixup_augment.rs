//! Cross-domain mixup: the λ sweep between two graphs, then corpus-level
//! augmentation of a synthetic three-family corpus.
//!
//! `cargo run --release --example mixup_augment -- [pairs] [seed]`

use graphprop::augment::{augment_corpus, build_synthetic_corpus, default_synthetic_specs, mixup, MixupSpec};
use graphprop::Graph;

fn main() -> graphprop::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse().expect("numeric argument")).collect();
    let pairs = args.first().copied().unwrap_or(20) as usize;
    let seed = args.get(1).copied().unwrap_or(0);

    let a = Graph::complete(6).with_id("K6");
    let b = Graph::cycle(8).with_id("C8");
    for lambda in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let t = mixup(&a, &b, &MixupSpec::threshold(lambda))?;
        let r = mixup(&a, &b, &MixupSpec::bernoulli(lambda, seed))?;
        println!(
            "lambda {lambda:.2}: threshold {} nodes {} edges, bernoulli {} edges",
            t.n(),
            t.edge_count(),
            r.edge_count()
        );
    }

    let corpus = build_synthetic_corpus(&default_synthetic_specs(90, 8, 16, seed))?;
    let augmented = augment_corpus(&corpus, pairs, &MixupSpec::threshold(0.5), seed)?;
    println!("\n{} graphs -> {} after augmentation", corpus.len(), augmented.len());
    for (domain, idx) in augmented.domains() {
        println!("  {domain:<14} {}", idx.len());
    }
    let g = augmented.graphs().last().unwrap();
    let p = g.provenance().unwrap();
    println!("last: {} from {:?} at lambda {}", g.id(), p.parents, p.lambda);
    Ok(())
}
