//! Seeded random graph models.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::rng_from_seed;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum GraphModel {
    ErdosRenyi { n: usize, p: f64 },
    BarabasiAlbert { n: usize, m: usize },
    WattsStrogatz { n: usize, k: usize, beta: f64 },
}

impl GraphModel {
    pub fn n(&self) -> usize {
        match *self {
            GraphModel::ErdosRenyi { n, .. }
            | GraphModel::BarabasiAlbert { n, .. }
            | GraphModel::WattsStrogatz { n, .. } => n,
        }
    }

    /// Short family tag, used as a domain name for synthetic corpora.
    pub fn family(&self) -> &'static str {
        match self {
            GraphModel::ErdosRenyi { .. } => "er",
            GraphModel::BarabasiAlbert { .. } => "ba",
            GraphModel::WattsStrogatz { .. } => "ws",
        }
    }

    /// Same model with a different node count.
    pub fn with_n(self, n: usize) -> GraphModel {
        match self {
            GraphModel::ErdosRenyi { p, .. } => GraphModel::ErdosRenyi { n, p },
            GraphModel::BarabasiAlbert { m, .. } => GraphModel::BarabasiAlbert { n, m },
            GraphModel::WattsStrogatz { k, beta, .. } => GraphModel::WattsStrogatz { n, k, beta },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Argument(msg));
        match *self {
            GraphModel::ErdosRenyi { n, p } => {
                if n == 0 {
                    return bad("erdos-renyi needs n >= 1".into());
                }
                if !(0.0..=1.0).contains(&p) {
                    return bad(format!("erdos-renyi p = {p} outside [0, 1]"));
                }
            }
            GraphModel::BarabasiAlbert { n, m } => {
                if m == 0 || m >= n {
                    return bad(format!("barabasi-albert needs 1 <= m < n, got m = {m}, n = {n}"));
                }
            }
            GraphModel::WattsStrogatz { n, k, beta } => {
                if n == 0 || k % 2 != 0 || k >= n {
                    return bad(format!("watts-strogatz needs even k < n, got k = {k}, n = {n}"));
                }
                if !(0.0..=1.0).contains(&beta) {
                    return bad(format!("watts-strogatz beta = {beta} outside [0, 1]"));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for GraphModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphModel::ErdosRenyi { n, p } => write!(f, "erdos-renyi(n={n},p={p})"),
            GraphModel::BarabasiAlbert { n, m } => write!(f, "barabasi-albert(n={n},m={m})"),
            GraphModel::WattsStrogatz { n, k, beta } => {
                write!(f, "watts-strogatz(n={n},k={k},beta={beta})")
            }
        }
    }
}

/// Draws one graph. Identical `(model, seed)` pairs give identical graphs.
pub fn generate(model: GraphModel, seed: u64) -> Result<Graph> {
    model.validate()?;
    let mut rng = rng_from_seed(seed);
    let id = format!("{}-{seed}", model.family());
    let domain = model.family();
    match model {
        GraphModel::ErdosRenyi { n, p } => {
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    // Always draw so the stream does not depend on p.
                    let r: f64 = rng.gen();
                    if r < p {
                        edges.push((u, v));
                    }
                }
            }
            Graph::new(id, domain, n, edges)
        }
        GraphModel::BarabasiAlbert { n, m } => {
            let mut edges = Vec::new();
            // Every node appears once per incident edge.
            let mut repeated: Vec<usize> = Vec::new();
            let mut targets: Vec<usize> = (0..m).collect();
            for source in m..n {
                for &t in &targets {
                    edges.push((t, source));
                    repeated.push(t);
                    repeated.push(source);
                }
                let mut chosen = BTreeSet::new();
                while chosen.len() < m {
                    let pick = repeated[rng.gen_range(0..repeated.len())];
                    chosen.insert(pick);
                }
                targets = chosen.into_iter().collect();
            }
            Graph::new(id, domain, n, edges)
        }
        GraphModel::WattsStrogatz { n, k, beta } => {
            let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
            for u in 0..n {
                for j in 1..=k / 2 {
                    let v = (u + j) % n;
                    adj[u].insert(v);
                    adj[v].insert(u);
                }
            }
            for j in 1..=k / 2 {
                for u in 0..n {
                    let v = (u + j) % n;
                    let r: f64 = rng.gen();
                    if r >= beta || !adj[u].contains(&v) {
                        continue;
                    }
                    if adj[u].len() >= n - 1 {
                        continue;
                    }
                    let mut w = rng.gen_range(0..n);
                    while w == u || adj[u].contains(&w) {
                        w = rng.gen_range(0..n);
                    }
                    adj[u].remove(&v);
                    adj[v].remove(&u);
                    adj[u].insert(w);
                    adj[w].insert(u);
                }
            }
            let edges = adj
                .iter()
                .enumerate()
                .flat_map(|(u, s)| s.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
                .collect::<Vec<_>>();
            Graph::new(id, domain, n, edges)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erdos_renyi_extremes() {
        let g = generate(GraphModel::ErdosRenyi { n: 5, p: 0.0 }, 1).unwrap();
        assert_eq!(g.edge_count(), 0);
        let g = generate(GraphModel::ErdosRenyi { n: 4, p: 1.0 }, 1).unwrap();
        assert_eq!(g.edge_count(), 6);
    }

    #[test]
    fn deterministic_under_seed() {
        let m = GraphModel::BarabasiAlbert { n: 10, m: 2 };
        assert_eq!(generate(m, 7).unwrap().edges(), generate(m, 7).unwrap().edges());
        let w = GraphModel::WattsStrogatz { n: 12, k: 4, beta: 0.3 };
        assert_eq!(generate(w, 3).unwrap().edges(), generate(w, 3).unwrap().edges());
    }

    #[test]
    fn model_edge_counts() {
        let g = generate(GraphModel::BarabasiAlbert { n: 10, m: 2 }, 7).unwrap();
        assert_eq!(g.edge_count(), 2 * (10 - 2));
        let g = generate(GraphModel::WattsStrogatz { n: 12, k: 4, beta: 0.5 }, 9).unwrap();
        assert_eq!(g.edge_count(), 12 * 2);
    }

    #[test]
    fn invalid_parameters() {
        assert!(generate(GraphModel::ErdosRenyi { n: 5, p: 1.5 }, 0).is_err());
        assert!(generate(GraphModel::BarabasiAlbert { n: 3, m: 3 }, 0).is_err());
        assert!(generate(GraphModel::WattsStrogatz { n: 6, k: 3, beta: 0.1 }, 0).is_err());
        assert!(generate(GraphModel::WattsStrogatz { n: 6, k: 6, beta: 0.1 }, 0).is_err());
    }
}
