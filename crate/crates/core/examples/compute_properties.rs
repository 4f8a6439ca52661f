//! Every registered invariant of a few named graphs, then the same table
//! as CSV.
//!
//! `cargo run --release --example compute_properties`

use graphprop::invariants::{compute_all, write_csv, Registry};
use graphprop::Graph;

fn main() -> graphprop::Result<()> {
    let graphs = [
        Graph::cycle(5).with_id("C5"),
        Graph::petersen().with_id("petersen"),
        Graph::complete_bipartite(3, 3).with_id("K3,3"),
        Graph::path(4).disjoint_union(&Graph::complete(3)).with_id("P4+K3"),
    ];
    let registry = Registry::default();
    let vectors: Vec<_> = graphs.iter().map(|g| compute_all(g, &registry)).collect();

    for (g, v) in graphs.iter().zip(&vectors) {
        println!("{}", g.id());
        for (name, value) in v.names.iter().zip(&v.values) {
            match value {
                Some(x) => println!("  {name:<28} {x:.6}"),
                None => println!("  {name:<28} masked ({:?})", v.status_of(name).unwrap()),
            }
        }
    }

    let ids: Vec<&str> = graphs.iter().map(|g| g.id()).collect();
    println!();
    write_csv(&ids, &vectors, std::io::stdout())
}
