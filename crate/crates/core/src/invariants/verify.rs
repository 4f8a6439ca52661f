//! Fast-versus-oracle comparison over exhaustive and random graph sets.

use std::collections::BTreeSet;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{compute_property, oracle::oracle_compute, Registry, ValueKind, LOVASZ_NUMBER};
use crate::error::Result;
use crate::generate::{generate, GraphModel};
use crate::graph::Graph;
use crate::invariants::distance::is_connected;
use crate::rng::{derive_seed, derived_rng};

/// Largest n for which [`graphs_up_to_isomorphism`] is supported.
pub const ENUMERATION_LIMIT: usize = 8;

type Code = u64;

fn pair_bit(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

fn code_of(adj: &[u32], n: usize, perm: &[usize]) -> Code {
    let mut c = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            if adj[perm[i]] >> perm[j] & 1 == 1 {
                c |= 1 << pair_bit(n, i, j);
            }
        }
    }
    c
}

/// Ordered partition of the vertices by iterated degree refinement.
fn refined_cells(adj: &[u32], n: usize) -> Vec<Vec<usize>> {
    let mut color: Vec<usize> = (0..n).map(|v| adj[v].count_ones() as usize).collect();
    loop {
        let sigs: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<usize> = (0..n).filter(|&w| adj[v] >> w & 1 == 1).map(|w| color[w]).collect();
                nb.sort_unstable();
                (color[v], nb)
            })
            .collect();
        let distinct: BTreeSet<&(usize, Vec<usize>)> = sigs.iter().collect();
        let ranked: Vec<&(usize, Vec<usize>)> = distinct.into_iter().collect();
        let next: Vec<usize> = sigs.iter().map(|s| ranked.binary_search(&s).unwrap()).collect();
        let before = color.iter().collect::<BTreeSet<_>>().len();
        let after = ranked.len();
        color = next;
        if after == before {
            break;
        }
    }
    let mut cells: Vec<Vec<usize>> = Vec::new();
    let top = color.iter().copied().max().unwrap_or(0);
    for c in 0..=top {
        let cell: Vec<usize> = (0..n).filter(|&v| color[v] == c).collect();
        if !cell.is_empty() {
            cells.push(cell);
        }
    }
    cells
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

/// Canonical code: the largest adjacency code over all vertex orders that
/// respect the refined partition. Refinement is isomorphism-invariant, so
/// isomorphic graphs get equal codes.
fn canonical_code(adj: &[u32], n: usize) -> Code {
    let cells = refined_cells(adj, n);
    let per_cell: Vec<Vec<Vec<usize>>> = cells.iter().map(|c| permutations(c)).collect();
    let mut best = 0;
    let mut idx = vec![0usize; cells.len()];
    loop {
        let perm: Vec<usize> = per_cell.iter().zip(&idx).flat_map(|(ps, &k)| ps[k].iter().copied()).collect();
        best = best.max(code_of(adj, n, &perm));
        let mut c = 0;
        loop {
            if c == idx.len() {
                return best;
            }
            idx[c] += 1;
            if idx[c] < per_cell[c].len() {
                break;
            }
            idx[c] = 0;
            c += 1;
        }
    }
}

fn graph_from_code(code: Code, n: usize) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if code >> pair_bit(n, i, j) & 1 == 1 {
                edges.push((i, j));
            }
        }
    }
    Graph::new(format!("n{n}-{code:x}"), "enumerated", n, edges).expect("valid enumerated graph")
}

fn adjacency_bits(code: Code, n: usize) -> Vec<u32> {
    let mut adj = vec![0u32; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if code >> pair_bit(n, i, j) & 1 == 1 {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
        }
    }
    adj
}

/// One representative of every isomorphism class on exactly `n` nodes,
/// built by adding a vertex to every class on `n − 1` nodes.
pub fn graphs_up_to_isomorphism(n: usize) -> Vec<Graph> {
    assert!(n <= ENUMERATION_LIMIT, "enumeration supports n <= {ENUMERATION_LIMIT}");
    let mut level: BTreeSet<Code> = BTreeSet::from([0]);
    for m in 1..n.max(1) {
        // Extend classes on m nodes to m + 1 nodes.
        let prev: Vec<Code> = level.iter().copied().collect();
        level = prev
            .par_iter()
            .flat_map_iter(|&code| {
                let base = adjacency_bits(code, m);
                (0u32..(1 << m)).map(move |nbrs| {
                    let mut adj: Vec<u32> = base.clone();
                    adj.push(nbrs);
                    for (v, row) in adj.iter_mut().enumerate().take(m) {
                        if nbrs >> v & 1 == 1 {
                            *row |= 1 << m;
                        }
                    }
                    canonical_code(&adj, m + 1)
                })
            })
            .collect();
    }
    if n == 0 {
        return Vec::new();
    }
    level.into_iter().map(|c| graph_from_code(c, n)).collect()
}

/// Connected isomorphism classes for every order `1..=max_n`.
pub fn connected_graphs_up_to(max_n: usize) -> Vec<Graph> {
    (1..=max_n)
        .flat_map(graphs_up_to_isomorphism)
        .filter(is_connected)
        .collect()
}

/// `count` G(n, p) graphs with n in `n_min..=n_max` and p cycling through
/// `ps`; graph `i` depends only on `(seed, i)`.
pub fn random_graphs(count: usize, n_min: usize, n_max: usize, ps: &[f64], seed: u64) -> Result<Vec<Graph>> {
    (0..count)
        .map(|i| {
            let n = derived_rng(seed, i as u64).gen_range(n_min..=n_max);
            let p = ps[i % ps.len()];
            Ok(generate(GraphModel::ErdosRenyi { n, p }, derive_seed(seed, i as u64))?.with_id(format!("random-{i}")))
        })
        .collect()
}

/// Allowed |fast − oracle| for a property.
pub fn tolerance(name: &str, kind: ValueKind) -> f64 {
    match kind {
        _ if name == LOVASZ_NUMBER => 1e-3,
        ValueKind::Integer | ValueKind::Rational => 0.0,
        ValueKind::Real => 1e-6,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mismatch {
    pub graph: String,
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub property: String,
    pub fast: Option<f64>,
    pub oracle: Option<f64>,
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub graphs: usize,
    pub comparisons: usize,
    pub mismatches: Vec<Mismatch>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn merge(&mut self, other: OracleReport) {
        self.graphs += other.graphs;
        self.comparisons += other.comparisons;
        self.mismatches.extend(other.mismatches);
    }
}

/// Compares every registered property of every graph with its oracle.
/// Inapplicability must agree too.
pub fn verify_graphs(graphs: &[Graph], registry: &Registry) -> OracleReport {
    let per_graph: Vec<(usize, Vec<Mismatch>)> = graphs
        .par_iter()
        .map(|g| {
            let mut bad = Vec::new();
            for desc in registry.descriptors() {
                let fast = compute_property(desc, g, registry.lovasz_tol);
                let oracle = oracle_compute(&desc.name, g);
                let tol = tolerance(&desc.name, desc.kind);
                let detail = match (&fast, &oracle) {
                    (Ok(Some(a)), Ok(Some(b))) if (a - b).abs() <= tol => continue,
                    (Ok(None), Ok(None)) => continue,
                    (Ok(_), Ok(_)) => None,
                    (Err(e), _) => Some(format!("fast path failed: {e}")),
                    (_, Err(e)) => Some(format!("oracle failed: {e}")),
                };
                bad.push(Mismatch {
                    graph: g.id().to_string(),
                    n: g.n(),
                    edges: g.edges().to_vec(),
                    property: desc.name.clone(),
                    fast: fast.ok().flatten(),
                    oracle: oracle.ok().flatten(),
                    detail,
                });
            }
            (registry.len(), bad)
        })
        .collect();
    let mut report = OracleReport {
        graphs: graphs.len(),
        ..OracleReport::default()
    };
    for (c, bad) in per_graph {
        report.comparisons += c;
        report.mismatches.extend(bad);
    }
    report
}
