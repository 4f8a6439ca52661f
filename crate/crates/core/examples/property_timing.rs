//! Times each registered property on graphs from the default synthetic
//! corpus.
//!
//! cargo run --release --example property_timing -- [graphs]

use std::time::Instant;

use graphprop::augment::{build_synthetic_corpus, default_synthetic_specs};
use graphprop::invariants::{compute_property, Registry};

fn main() -> graphprop::Result<()> {
    let graphs = std::env::args().nth(1).map_or(30, |a| a.parse().expect("graph count"));
    let corpus = build_synthetic_corpus(&default_synthetic_specs(graphs, 8, 24, 0))?;
    let registry = Registry::default();
    for desc in registry.descriptors() {
        let start = Instant::now();
        let mut failures = 0;
        for g in corpus.graphs() {
            if desc.applicability.check(g).is_ok() && compute_property(desc, g, registry.lovasz_tol).is_err() {
                failures += 1;
            }
        }
        let per = start.elapsed().as_secs_f64() * 1e3 / corpus.len() as f64;
        println!("{:<28} {per:>9.3} ms/graph  failures {failures}", desc.name);
    }
    Ok(())
}
