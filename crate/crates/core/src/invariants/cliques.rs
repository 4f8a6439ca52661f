//! Exact maximum clique, maximum independent set and maximum-weight
//! independent set by bitset branch and bound. Graphs are limited to 64 nodes
//! by the bitset width; callers enforce tighter size limits.

use crate::graph::Graph;

pub(crate) type Bits = u64;

pub(crate) fn adjacency_bits(g: &Graph) -> Vec<Bits> {
    assert!(g.n() <= 64, "bitset routines support at most 64 nodes");
    (0..g.n())
        .map(|v| g.neighbors(v).iter().fold(0, |acc, &w| acc | (1 << w)))
        .collect()
}

pub(crate) fn complement_bits(adj: &[Bits]) -> Vec<Bits> {
    let n = adj.len();
    let full: Bits = if n == 64 { !0 } else { (1 << n) - 1 };
    adj.iter()
        .enumerate()
        .map(|(v, &row)| !row & full & !(1 << v))
        .collect()
}

struct CliqueSearch<'a> {
    adj: &'a [Bits],
    best: usize,
}

impl CliqueSearch<'_> {
    /// Greedy sequential colouring of `cand`; returns vertices with their
    /// colour number, in non-decreasing colour order.
    fn colour(&self, mut cand: Bits) -> Vec<(usize, usize)> {
        let mut order = Vec::with_capacity(cand.count_ones() as usize);
        let mut colour = 0;
        while cand != 0 {
            colour += 1;
            let mut avail = cand;
            while avail != 0 {
                let v = avail.trailing_zeros() as usize;
                avail &= !(1 << v);
                avail &= !self.adj[v];
                cand &= !(1 << v);
                order.push((v, colour));
            }
        }
        order
    }

    fn expand(&mut self, size: usize, cand: Bits) {
        let order = self.colour(cand);
        let mut cand = cand;
        for &(v, colour) in order.iter().rev() {
            // Colour classes bound the clique size reachable from here.
            if size + colour <= self.best {
                return;
            }
            let next = cand & self.adj[v];
            if next == 0 {
                self.best = self.best.max(size + 1);
            } else {
                self.expand(size + 1, next);
            }
            cand &= !(1 << v);
        }
    }
}

fn max_clique_bits(adj: &[Bits]) -> usize {
    let n = adj.len();
    if n == 0 {
        return 0;
    }
    // Seed with a greedy clique built in degree order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(adj[v].count_ones()));
    let mut clique: Bits = 0;
    let mut size = 0;
    for &v in &order {
        if clique & !adj[v] == 0 {
            clique |= 1 << v;
            size += 1;
        }
    }
    let all: Bits = if n == 64 { !0 } else { (1 << n) - 1 };
    let mut search = CliqueSearch { adj, best: size };
    search.expand(0, all);
    search.best
}

/// ω(G).
pub fn clique_number(g: &Graph) -> usize {
    max_clique_bits(&adjacency_bits(g))
}

/// α(G) = ω(Ḡ).
pub fn independence_number(g: &Graph) -> usize {
    max_clique_bits(&complement_bits(&adjacency_bits(g)))
}

/// Maximum total weight of an independent set under non-negative `weights`,
/// returned with the set as a bitmask.
pub fn max_weight_independent_set(g: &Graph, weights: &[f64]) -> (f64, Bits) {
    let adj = adjacency_bits(g);
    let n = g.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    let mut best = (0.0, 0);
    mwis(&adj, weights, &order, 0, 0, 0.0, &mut best);
    best
}

fn mwis(adj: &[Bits], w: &[f64], order: &[usize], pos: usize, chosen: Bits, weight: f64, best: &mut (f64, Bits)) {
    if weight > best.0 {
        *best = (weight, chosen);
    }
    let mut remaining = 0.0;
    for &v in &order[pos..] {
        if chosen & (1 << v) == 0 && adj[v] & chosen == 0 {
            remaining += w[v].max(0.0);
        }
    }
    if weight + remaining <= best.0 {
        return;
    }
    for (i, &v) in order.iter().enumerate().skip(pos) {
        if adj[v] & chosen != 0 || w[v] <= 0.0 {
            continue;
        }
        mwis(adj, w, order, i + 1, chosen | (1 << v), weight + w[v], best);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(independence_number(&Graph::cycle(5)), 2);
        assert_eq!(independence_number(&Graph::complete(4)), 1);
        assert_eq!(independence_number(&Graph::empty(6)), 6);
        assert_eq!(independence_number(&Graph::petersen()), 4);
        assert_eq!(clique_number(&Graph::complete(4)), 4);
        assert_eq!(clique_number(&Graph::cycle(5)), 2);
        assert_eq!(clique_number(&Graph::complete_bipartite(3, 3)), 2);
        assert_eq!(clique_number(&Graph::empty(3)), 1);
    }

    #[test]
    fn weighted_independent_set() {
        let g = Graph::path(3);
        let (w, set) = max_weight_independent_set(&g, &[1.0, 3.0, 1.0]);
        assert_eq!(w, 3.0);
        assert_eq!(set, 0b010);
        let (w, set) = max_weight_independent_set(&g, &[2.0, 3.0, 2.0]);
        assert_eq!(w, 4.0);
        assert_eq!(set, 0b101);
    }
}
