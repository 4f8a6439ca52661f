//! Graph data model: simple undirected graphs with optional node features,
//! labels and augmentation provenance, and corpora partitioned by domain.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Where an augmented graph came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub parents: [String; 2],
    pub lambda: f64,
}

/// An immutable simple undirected graph on nodes `0..n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    id: String,
    domain: String,
    n: usize,
    /// Sorted, each pair stored as `(u, v)` with `u < v`.
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
    features: Option<Matrix>,
    label: Option<i64>,
    provenance: Option<Provenance>,
}

impl Graph {
    /// Validates and builds a graph. Edges may be given in either orientation
    /// but each unordered pair at most once.
    pub fn new(
        id: impl Into<String>,
        domain: impl Into<String>,
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Graph> {
        let id = id.into();
        if n == 0 {
            return Err(Error::validation(&id, "graph must have at least one node"));
        }
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::validation(
                    &id,
                    format!("edge ({u}, {v}) has an endpoint outside 0..{n}"),
                ));
            }
            if u == v {
                return Err(Error::validation(&id, format!("self-loop on node {u}")));
            }
            if !set.insert((u.min(v), u.max(v))) {
                return Err(Error::validation(
                    &id,
                    format!("duplicate edge ({u}, {v})"),
                ));
            }
        }
        Ok(Self::from_sorted_unchecked(id, domain.into(), n, set.into_iter().collect()))
    }

    fn from_sorted_unchecked(id: String, domain: String, n: usize, edges: Vec<(usize, usize)>) -> Graph {
        let mut neighbors = vec![Vec::new(); n];
        for &(u, v) in &edges {
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        Graph {
            id,
            domain,
            n,
            edges,
            neighbors,
            features: None,
            label: None,
            provenance: None,
        }
    }

    /// Builds a graph from a symmetric 0/1 adjacency matrix. Entries are
    /// read from the strict upper triangle only.
    pub fn from_adjacency(id: impl Into<String>, domain: impl Into<String>, a: &Matrix) -> Result<Graph> {
        let n = a.rows();
        let id = id.into();
        if a.cols() != n {
            return Err(Error::Shape(format!("adjacency of `{id}` is not square")));
        }
        let mut edges = Vec::new();
        for i in 0..n {
            if a[(i, i)] != 0.0 {
                return Err(Error::validation(&id, format!("self-loop on node {i}")));
            }
            for j in (i + 1)..n {
                let v = a[(i, j)];
                if v != a[(j, i)] {
                    return Err(Error::validation(&id, "adjacency is not symmetric"));
                }
                if v == 1.0 {
                    edges.push((i, j));
                } else if v != 0.0 {
                    return Err(Error::validation(&id, "adjacency entries must be 0 or 1"));
                }
            }
        }
        Graph::new(id, domain, n, edges)
    }

    pub fn with_features(mut self, features: Matrix) -> Result<Graph> {
        if features.rows() != self.n {
            return Err(Error::validation(
                &self.id,
                format!("feature matrix has {} rows, expected {}", features.rows(), self.n),
            ));
        }
        self.features = Some(features);
        Ok(self)
    }

    pub fn with_label(mut self, label: Option<i64>) -> Graph {
        self.label = label;
        self
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Graph {
        self.provenance = Some(provenance);
        self
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Graph {
        self.id = id.into();
        self
    }

    pub fn with_domain(mut self, domain: impl Into<String>) -> Graph {
        self.domain = domain.into();
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn domain(&self) -> &str {
        &self.domain
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn features(&self) -> Option<&Matrix> {
        self.features.as_ref()
    }

    pub fn label(&self) -> Option<i64> {
        self.label
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.neighbors.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.neighbors[u].binary_search(&v).is_ok()
    }

    /// Dense symmetric 0/1 adjacency matrix with zero diagonal.
    pub fn adjacency(&self) -> Matrix {
        let mut a = Matrix::zeros(self.n, self.n);
        for &(u, v) in &self.edges {
            a[(u, v)] = 1.0;
            a[(v, u)] = 1.0;
        }
        a
    }

    /// Graph on the same nodes with every non-edge turned into an edge.
    pub fn complement(&self) -> Graph {
        let mut edges = Vec::new();
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                if !self.has_edge(u, v) {
                    edges.push((u, v));
                }
            }
        }
        Self::from_sorted_unchecked(format!("{}~c", self.id), self.domain.clone(), self.n, edges)
    }

    /// Relabels node `v` as `perm[v]`. Features are permuted along.
    pub fn relabel(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.n {
            return Err(Error::Argument(format!(
                "permutation length {} does not match node count {}",
                perm.len(),
                self.n
            )));
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Argument("not a permutation".into()));
            }
        }
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (perm[u], perm[v]);
                (a.min(b), a.max(b))
            })
            .collect();
        edges.sort_unstable();
        let mut g = Self::from_sorted_unchecked(self.id.clone(), self.domain.clone(), self.n, edges);
        g.label = self.label;
        g.provenance = self.provenance.clone();
        if let Some(x) = &self.features {
            let mut y = Matrix::zeros(x.rows(), x.cols());
            for (v, &p) in perm.iter().enumerate() {
                y.row_mut(p).copy_from_slice(x.row(v));
            }
            g.features = Some(y);
        }
        Ok(g)
    }

    /// Same graph with edge `{u, v}` toggled.
    pub fn toggle_edge(&self, u: usize, v: usize) -> Result<Graph> {
        if u == v || u >= self.n || v >= self.n {
            return Err(Error::Argument(format!("cannot toggle pair ({u}, {v})")));
        }
        let key = (u.min(v), u.max(v));
        let mut edges = self.edges.clone();
        match edges.binary_search(&key) {
            Ok(pos) => {
                edges.remove(pos);
            }
            Err(pos) => edges.insert(pos, key),
        }
        let mut g = Self::from_sorted_unchecked(self.id.clone(), self.domain.clone(), self.n, edges);
        g.label = self.label;
        g.features = self.features.clone();
        Ok(g)
    }

    // Named families, handy in tests and examples.

    pub fn empty(n: usize) -> Graph {
        Self::from_sorted_unchecked(format!("empty{n}"), "named".into(), n, Vec::new())
    }

    pub fn complete(n: usize) -> Graph {
        let edges = (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v))).collect();
        Self::from_sorted_unchecked(format!("K{n}"), "named".into(), n, edges)
    }

    pub fn path(n: usize) -> Graph {
        let edges = (1..n).map(|v| (v - 1, v)).collect();
        Self::from_sorted_unchecked(format!("P{n}"), "named".into(), n, edges)
    }

    /// Cycle on `n >= 3` nodes.
    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3, "cycle needs at least three nodes");
        Graph::new(format!("C{n}"), "named", n, (0..n).map(|v| (v, (v + 1) % n))).expect("valid cycle")
    }

    /// Star with centre 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Graph {
        let edges = (1..=leaves).map(|v| (0, v)).collect();
        Self::from_sorted_unchecked(format!("S{leaves}"), "named".into(), leaves + 1, edges)
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Graph {
        let edges = (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v))).collect();
        Self::from_sorted_unchecked(format!("K{a},{b}"), "named".into(), a + b, edges)
    }

    pub fn petersen() -> Graph {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::new("petersen", "named", 10, edges).expect("valid Petersen graph")
    }

    /// Disjoint union; nodes of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.n;
        let edges = self
            .edges
            .iter()
            .copied()
            .chain(other.edges.iter().map(|&(u, v)| (u + shift, v + shift)))
            .collect();
        Self::from_sorted_unchecked(
            format!("{}+{}", self.id, other.id),
            self.domain.clone(),
            self.n + other.n,
            edges,
        )
    }
}

/// Diagonal degree matrix of a symmetric adjacency matrix.
pub fn degree_matrix(a: &Matrix) -> Matrix {
    let n = a.rows();
    let mut d = Matrix::zeros(n, n);
    for i in 0..n {
        d[(i, i)] = a.row(i).iter().sum();
    }
    d
}

/// An ordered collection of graphs partitioned by domain tag.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Corpus {
    graphs: Vec<Graph>,
    /// Domain tags in order of first appearance, each with its graph indices.
    domains: Vec<(String, Vec<usize>)>,
}

impl Corpus {
    pub fn new(graphs: Vec<Graph>) -> Corpus {
        let mut domains: Vec<(String, Vec<usize>)> = Vec::new();
        for (i, g) in graphs.iter().enumerate() {
            match domains.iter_mut().find(|(d, _)| d == g.domain()) {
                Some((_, idx)) => idx.push(i),
                None => domains.push((g.domain().to_string(), vec![i])),
            }
        }
        Corpus { graphs, domains }
    }

    pub fn graphs(&self) -> &[Graph] {
        &self.graphs
    }

    pub fn into_graphs(self) -> Vec<Graph> {
        self.graphs
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn domains(&self) -> &[(String, Vec<usize>)] {
        &self.domains
    }

    pub fn domain_count(&self) -> usize {
        self.domains.len()
    }

    /// Domain block index of every graph, in graph order.
    pub fn domain_assignment(&self) -> Vec<usize> {
        let mut out = vec![0; self.graphs.len()];
        for (b, (_, idx)) in self.domains.iter().enumerate() {
            for &i in idx {
                out[i] = b;
            }
        }
        out
    }

    pub fn extend(self, more: impl IntoIterator<Item = Graph>) -> Corpus {
        let mut graphs = self.graphs;
        graphs.extend(more);
        Corpus::new(graphs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjacency_of_small_graphs() {
        let k3 = Graph::complete(3).adjacency();
        assert_eq!(k3, Matrix::from_fn(3, 3, |i, j| if i == j { 0.0 } else { 1.0 }));
        assert_eq!(Graph::empty(1).adjacency(), Matrix::zeros(1, 1));
        let p3 = Graph::path(3).adjacency();
        assert_eq!(p3[(0, 2)], 0.0);
        assert_eq!(p3[(0, 1)], 1.0);
        assert_eq!(p3[(1, 2)], 1.0);
    }

    #[test]
    fn degree_matrices() {
        let d = degree_matrix(&Graph::complete(3).adjacency());
        assert_eq!(d, Matrix::from_fn(3, 3, |i, j| if i == j { 2.0 } else { 0.0 }));
        let d = degree_matrix(&Graph::star(3).adjacency());
        let diag: Vec<f64> = (0..4).map(|i| d[(i, i)]).collect();
        assert_eq!(diag, vec![3.0, 1.0, 1.0, 1.0]);
        assert_eq!(degree_matrix(&Graph::empty(4).adjacency()), Matrix::zeros(4, 4));
    }

    #[test]
    fn validation_rejects_bad_edges() {
        assert!(matches!(Graph::new("g", "d", 3, [(0, 5)]), Err(Error::Validation { .. })));
        assert!(matches!(Graph::new("g", "d", 3, [(1, 1)]), Err(Error::Validation { .. })));
        assert!(matches!(Graph::new("g", "d", 3, [(0, 1), (1, 0)]), Err(Error::Validation { .. })));
        assert!(Graph::new("g", "d", 0, []).is_err());
        let g = Graph::new("g", "d", 2, [(0, 1)]).unwrap();
        assert!(g.with_features(Matrix::zeros(3, 2)).is_err());
    }

    #[test]
    fn relabel_and_complement() {
        let p = Graph::path(4);
        let r = p.relabel(&[3, 1, 0, 2]).unwrap();
        assert!(r.has_edge(3, 1) && r.has_edge(1, 0) && r.has_edge(0, 2));
        assert_eq!(r.edge_count(), 3);
        assert_eq!(Graph::complete(5).complement().edge_count(), 0);
        assert!(p.relabel(&[0, 0, 1, 2]).is_err());
    }

    #[test]
    fn corpus_partitions_by_domain() {
        let gs = vec![
            Graph::empty(2).with_domain("a"),
            Graph::empty(2).with_domain("b"),
            Graph::empty(2).with_domain("a"),
        ];
        let c = Corpus::new(gs);
        assert_eq!(c.domain_count(), 2);
        assert_eq!(c.domains()[0].1, vec![0, 2]);
        assert_eq!(c.domain_assignment(), vec![0, 1, 0]);
    }
}
