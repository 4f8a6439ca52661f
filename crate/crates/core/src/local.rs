//! Node-level and node-pair property targets used as auxiliary supervision.

use std::collections::VecDeque;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::invariants::distance::{all_pairs_distances, component_labels, is_connected, UNREACHABLE};
use crate::linalg::Matrix;

pub const DEGREE: &str = "degree";
pub const CLOSENESS: &str = "closeness";
pub const BETWEENNESS: &str = "betweenness";
pub const SHORTEST_PATH: &str = "shortest_path";
pub const CONNECTIVITY: &str = "connectivity";

pub const NODE_PROPERTIES: [&str; 3] = [DEGREE, CLOSENESS, BETWEENNESS];
pub const PAIR_PROPERTIES: [&str; 2] = [SHORTEST_PATH, CONNECTIVITY];

/// One value per node. A masked vector carries zeros and must be ignored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodePropertyVector {
    pub name: String,
    pub values: Vec<f64>,
    pub masked: bool,
}

/// Symmetric n×n values; `defined[i*n+j]` is false for masked pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairPropertyMatrix {
    pub name: String,
    pub values: Matrix,
    pub defined: Vec<bool>,
}

impl PairPropertyMatrix {
    pub fn is_defined(&self, i: usize, j: usize) -> bool {
        self.defined[i * self.values.cols() + j]
    }
}

pub fn node_degrees(g: &Graph) -> NodePropertyVector {
    NodePropertyVector {
        name: DEGREE.into(),
        values: g.degrees().into_iter().map(|d| d as f64).collect(),
        masked: false,
    }
}

/// `(n − 1) / Σ_v dist(u, v)`. Masked on disconnected graphs; a single node
/// gets 0.
pub fn closeness_centrality(g: &Graph) -> NodePropertyVector {
    let n = g.n();
    if !is_connected(g) {
        return NodePropertyVector {
            name: CLOSENESS.into(),
            values: vec![0.0; n],
            masked: true,
        };
    }
    let d = all_pairs_distances(g);
    let values = d
        .iter()
        .map(|row| {
            let total: usize = row.iter().sum();
            if total == 0 {
                0.0
            } else {
                (n - 1) as f64 / total as f64
            }
        })
        .collect();
    NodePropertyVector {
        name: CLOSENESS.into(),
        values,
        masked: false,
    }
}

/// Unnormalized shortest-path betweenness, each unordered pair counted once.
pub fn betweenness_centrality(g: &Graph) -> NodePropertyVector {
    let n = g.n();
    let mut cb = vec![0.0; n];
    let mut stack = Vec::with_capacity(n);
    let mut queue = VecDeque::with_capacity(n);
    for s in 0..n {
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut sigma = vec![0.0f64; n];
        let mut dist = vec![UNREACHABLE; n];
        sigma[s] = 1.0;
        dist[s] = 0;
        stack.clear();
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &w in g.neighbors(v) {
                if dist[w] == UNREACHABLE {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        let mut delta = vec![0.0; n];
        while let Some(w) = stack.pop() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                cb[w] += delta[w];
            }
        }
    }
    NodePropertyVector {
        name: BETWEENNESS.into(),
        values: cb.into_iter().map(|c| c / 2.0).collect(),
        masked: false,
    }
}

/// BFS distances with unreachable pairs masked (value 0).
pub fn shortest_path_matrix(g: &Graph) -> PairPropertyMatrix {
    let n = g.n();
    let d = all_pairs_distances(g);
    let mut values = Matrix::zeros(n, n);
    let mut defined = vec![true; n * n];
    for i in 0..n {
        for j in 0..n {
            if d[i][j] == UNREACHABLE {
                defined[i * n + j] = false;
            } else {
                values[(i, j)] = d[i][j] as f64;
            }
        }
    }
    PairPropertyMatrix {
        name: SHORTEST_PATH.into(),
        values,
        defined,
    }
}

/// 1 off the diagonal when two nodes share a component, else 0.
pub fn pair_connectivity(g: &Graph) -> PairPropertyMatrix {
    let n = g.n();
    let labels = component_labels(g);
    PairPropertyMatrix {
        name: CONNECTIVITY.into(),
        values: Matrix::from_fn(n, n, |i, j| if i != j && labels[i] == labels[j] { 1.0 } else { 0.0 }),
        defined: vec![true; n * n],
    }
}

pub fn node_property(g: &Graph, name: &str) -> Result<NodePropertyVector> {
    match name {
        DEGREE => Ok(node_degrees(g)),
        CLOSENESS => Ok(closeness_centrality(g)),
        BETWEENNESS => Ok(betweenness_centrality(g)),
        other => Err(Error::Argument(format!("unknown node property `{other}`"))),
    }
}

pub fn pair_property(g: &Graph, name: &str) -> Result<PairPropertyMatrix> {
    match name {
        SHORTEST_PATH => Ok(shortest_path_matrix(g)),
        CONNECTIVITY => Ok(pair_connectivity(g)),
        other => Err(Error::Argument(format!("unknown pair property `{other}`"))),
    }
}

/// All node and pair targets of one graph.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalTargets {
    pub nodes: Vec<NodePropertyVector>,
    pub pairs: Vec<PairPropertyMatrix>,
}

pub fn local_targets(g: &Graph, node_names: &[String], pair_names: &[String]) -> Result<LocalTargets> {
    Ok(LocalTargets {
        nodes: node_names.iter().map(|n| node_property(g, n)).collect::<Result<_>>()?,
        pairs: pair_names.iter().map(|n| pair_property(g, n)).collect::<Result<_>>()?,
    })
}

/// Mean and population std of one local property over a corpus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalStats {
    pub name: String,
    pub mean: f64,
    pub std: f64,
}

/// Z-scoring for node and pair targets, fitted over every defined entry in
/// the training corpus. Pair statistics skip the diagonal.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LocalNormalization {
    pub nodes: Vec<LocalStats>,
    pub pairs: Vec<LocalStats>,
}

fn stats(name: &str, values: impl Iterator<Item = f64>) -> LocalStats {
    let (mut count, mut sum, mut sq) = (0.0, 0.0, 0.0);
    for v in values {
        count += 1.0;
        sum += v;
        sq += v * v;
    }
    let mean = if count > 0.0 { sum / count } else { 0.0 };
    let var = if count > 0.0 { (sq / count - mean * mean).max(0.0) } else { 0.0 };
    // A constant target is centred but left unscaled.
    let std = if var.sqrt() > 1e-12 { var.sqrt() } else { 1.0 };
    LocalStats {
        name: name.into(),
        mean,
        std,
    }
}

impl LocalNormalization {
    pub fn fit(targets: &[LocalTargets]) -> LocalNormalization {
        let Some(first) = targets.first() else {
            return LocalNormalization::default();
        };
        let nodes = (0..first.nodes.len())
            .map(|k| {
                let vals = targets
                    .iter()
                    .filter(|t| !t.nodes[k].masked)
                    .flat_map(|t| t.nodes[k].values.iter().copied());
                stats(&first.nodes[k].name, vals)
            })
            .collect();
        let pairs = (0..first.pairs.len())
            .map(|k| {
                let vals = targets.iter().flat_map(|t| {
                    let p = &t.pairs[k];
                    let n = p.values.rows();
                    (0..n)
                        .flat_map(move |i| (0..n).map(move |j| (i, j)))
                        .filter(move |&(i, j)| i != j && p.is_defined(i, j))
                        .map(move |(i, j)| p.values[(i, j)])
                });
                stats(&first.pairs[k].name, vals)
            })
            .collect();
        LocalNormalization { nodes, pairs }
    }

    pub fn apply(&self, t: &LocalTargets) -> LocalTargets {
        let mut out = t.clone();
        for (v, s) in out.nodes.iter_mut().zip(&self.nodes) {
            for x in &mut v.values {
                *x = (*x - s.mean) / s.std;
            }
        }
        for (p, s) in out.pairs.iter_mut().zip(&self.pairs) {
            for x in p.values.as_mut_slice() {
                *x = (*x - s.mean) / s.std;
            }
        }
        out
    }
}

/// CSV with columns `node,<name>...`; masked vectors leave empty cells.
pub fn write_node_csv(vectors: &[NodePropertyVector], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["node".to_string()];
    header.extend(vectors.iter().map(|v| v.name.clone()));
    w.write_record(&header)?;
    let n = vectors.first().map_or(0, |v| v.values.len());
    for i in 0..n {
        let mut row = vec![i.to_string()];
        row.extend(vectors.iter().map(|v| if v.masked { String::new() } else { v.values[i].to_string() }));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Row-major text dump under a `# name=.. n=..` header; masked entries
/// are written as `nan`.
pub fn write_pair_text(p: &PairPropertyMatrix, mut out: impl Write) -> Result<()> {
    let n = p.values.rows();
    writeln!(out, "# name={} n={}", p.name, n)?;
    for i in 0..n {
        let row: Vec<String> = (0..n)
            .map(|j| if p.is_defined(i, j) { p.values[(i, j)].to_string() } else { "nan".into() })
            .collect();
        writeln!(out, "{}", row.join(" "))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_examples() {
        assert_eq!(node_degrees(&Graph::star(3)).values, vec![3.0, 1.0, 1.0, 1.0]);
        assert_eq!(node_degrees(&Graph::complete(3)).values, vec![2.0; 3]);
        assert_eq!(node_degrees(&Graph::empty(4)).values, vec![0.0; 4]);
    }

    #[test]
    fn closeness_examples() {
        assert_eq!(closeness_centrality(&Graph::complete(5)).values, vec![1.0; 5]);
        let p3 = closeness_centrality(&Graph::path(3)).values;
        assert_eq!(p3, vec![2.0 / 3.0, 1.0, 2.0 / 3.0]);
        assert_eq!(closeness_centrality(&Graph::cycle(4)).values, vec![0.75; 4]);
        assert!(closeness_centrality(&Graph::empty(2)).masked);
    }

    #[test]
    fn betweenness_examples() {
        assert_eq!(betweenness_centrality(&Graph::path(3)).values, vec![0.0, 1.0, 0.0]);
        assert_eq!(betweenness_centrality(&Graph::complete(5)).values, vec![0.0; 5]);
        assert_eq!(betweenness_centrality(&Graph::star(3)).values, vec![3.0, 0.0, 0.0, 0.0]);
        // Two shortest paths between opposite corners of C4.
        assert_eq!(betweenness_centrality(&Graph::cycle(4)).values, vec![0.5; 4]);
    }

    #[test]
    fn pair_examples() {
        assert_eq!(shortest_path_matrix(&Graph::path(3)).values.max_abs(), 2.0);
        let two = Graph::path(2).disjoint_union(&Graph::path(2));
        let sp = shortest_path_matrix(&two);
        assert!(!sp.is_defined(0, 2) && sp.is_defined(0, 1));
        let k4 = shortest_path_matrix(&Graph::complete(4));
        assert!((0..4).all(|i| (0..4).all(|j| k4.values[(i, j)] == if i == j { 0.0 } else { 1.0 })));

        let tri = Graph::complete(3).disjoint_union(&Graph::complete(3));
        let c = pair_connectivity(&tri);
        assert_eq!(c.values[(0, 1)], 1.0);
        assert_eq!(c.values[(0, 3)], 0.0);
        let iso = Graph::complete(3).disjoint_union(&Graph::empty(1));
        let c = pair_connectivity(&iso);
        assert!((0..4).all(|j| c.values[(3, j)] == 0.0));
    }

    #[test]
    fn dumps() {
        let mut buf = Vec::new();
        write_node_csv(&[node_degrees(&Graph::path(2)), closeness_centrality(&Graph::path(2))], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "node,degree,closeness\n0,1,1\n1,1,1\n");
        let mut buf = Vec::new();
        write_pair_text(&shortest_path_matrix(&Graph::empty(2)), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "# name=shortest_path n=2\n0 nan\nnan 0\n");
    }

    #[test]
    fn normalization_centres_defined_entries() {
        let names: Vec<String> = NODE_PROPERTIES.iter().map(|s| s.to_string()).collect();
        let pairs: Vec<String> = PAIR_PROPERTIES.iter().map(|s| s.to_string()).collect();
        let ts: Vec<_> = [Graph::path(4), Graph::star(4), Graph::complete(3)]
            .iter()
            .map(|g| local_targets(g, &names, &pairs).unwrap())
            .collect();
        let norm = LocalNormalization::fit(&ts);
        let z: Vec<_> = ts.iter().map(|t| norm.apply(t)).collect();
        let deg: Vec<f64> = z.iter().flat_map(|t| t.nodes[0].values.clone()).collect();
        let mean = deg.iter().sum::<f64>() / deg.len() as f64;
        assert!(mean.abs() < 1e-12);
    }
}
