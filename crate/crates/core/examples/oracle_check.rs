//! Fast invariants against brute-force oracles on every connected graph up
//! to `max_n` nodes and on a batch of random G(n, p) graphs.
//!
//! `cargo run --release --example oracle_check -- [max_n] [random] [seed]`

use std::time::Instant;

use graphprop::invariants::verify::{connected_graphs_up_to, random_graphs, verify_graphs};
use graphprop::invariants::Registry;

fn main() -> graphprop::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let max_n = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let random = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(500);
    let seed = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(0);
    let registry = Registry::default();

    let start = Instant::now();
    let exhaustive = connected_graphs_up_to(max_n);
    let mut report = verify_graphs(&exhaustive, &registry);
    println!("{} connected classes with n <= {max_n}: {} mismatches", exhaustive.len(), report.mismatches.len());

    let sampled = random_graphs(random, 3, 10, &[0.2, 0.5, 0.8], seed)?;
    let r = verify_graphs(&sampled, &registry);
    println!("{} random graphs: {} mismatches", sampled.len(), r.mismatches.len());
    report.merge(r);

    for m in report.mismatches.iter().take(20) {
        println!("  {} {}: fast {:?} oracle {:?} {:?}", m.graph, m.property, m.fast, m.oracle, m.detail);
    }
    println!("{} comparisons in {:.1}s", report.comparisons, start.elapsed().as_secs_f64());
    Ok(())
}
