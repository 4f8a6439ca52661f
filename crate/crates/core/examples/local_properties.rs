//! Node and node-pair targets (degree, closeness, betweenness, shortest
//! paths, connectivity) for a small graph.
//!
//! `cargo run --release --example local_properties`

use graphprop::local::{node_property, pair_property, write_node_csv, write_pair_text, NODE_PROPERTIES, PAIR_PROPERTIES};
use graphprop::Graph;

fn main() -> graphprop::Result<()> {
    // A 4-cycle with a pendant path hanging off node 0.
    let g = Graph::new("kite", "example", 6, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (4, 5)])?;
    let nodes = NODE_PROPERTIES
        .iter()
        .map(|p| node_property(&g, p))
        .collect::<graphprop::Result<Vec<_>>>()?;
    write_node_csv(&nodes, std::io::stdout())?;
    for p in PAIR_PROPERTIES {
        println!();
        write_pair_text(&pair_property(&g, p)?, std::io::stdout())?;
    }

    // Closeness is masked on a disconnected graph; the rest stay defined.
    let split = g.disjoint_union(&Graph::complete(2));
    let closeness = node_property(&split, "closeness")?;
    println!("\ncloseness masked after adding a component: {}", closeness.masked);
    Ok(())
}
