//! Seeded random graphs from the three generators, with simple summary
//! statistics per family.
//!
//! `cargo run --release --example generate_graphs -- [n] [count] [seed]`

use graphprop::generate::{generate, GraphModel};
use graphprop::invariants::distance::is_connected;
use graphprop::rng::derive_seed;

fn main() -> graphprop::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse().expect("numeric argument")).collect();
    let n = args.first().copied().unwrap_or(50) as usize;
    let count = args.get(1).copied().unwrap_or(20);
    let seed = args.get(2).copied().unwrap_or(0);

    let models = [
        GraphModel::ErdosRenyi { n, p: 0.1 },
        GraphModel::BarabasiAlbert { n, m: 2 },
        GraphModel::WattsStrogatz { n, k: 4, beta: 0.1 },
    ];
    for model in models {
        let graphs = (0..count)
            .map(|i| generate(model, derive_seed(seed, i)))
            .collect::<graphprop::Result<Vec<_>>>()?;
        let edges = graphs.iter().map(|g| g.edge_count()).sum::<usize>() as f64 / count as f64;
        let max_degree = graphs.iter().flat_map(|g| g.degrees()).max().unwrap_or(0);
        let connected = graphs.iter().filter(|g| is_connected(g)).count();
        println!(
            "{:<3} mean edges {edges:>7.1}  max degree {max_degree:>3}  connected {connected}/{count}",
            model.family()
        );
    }
    // Same seed, same graph.
    let a = generate(models[0], seed)?;
    let b = generate(models[0], seed)?;
    println!("reproducible: {}", a.edges() == b.edges());
    Ok(())
}
