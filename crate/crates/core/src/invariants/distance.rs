//! BFS-based invariants: components, diameter, girth, Wiener indices.

use std::collections::VecDeque;

use crate::graph::Graph;

/// Marker for unreachable pairs in a distance table.
pub const UNREACHABLE: usize = usize::MAX;

/// Distances from `source` to every node; [`UNREACHABLE`] where no path exists.
pub fn bfs_distances(g: &Graph, source: usize) -> Vec<usize> {
    let mut dist = vec![UNREACHABLE; g.n()];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if dist[w] == UNREACHABLE {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

pub fn all_pairs_distances(g: &Graph) -> Vec<Vec<usize>> {
    (0..g.n()).map(|s| bfs_distances(g, s)).collect()
}

/// Component index of every node, numbered in order of lowest member.
pub fn component_labels(g: &Graph) -> Vec<usize> {
    let mut label = vec![UNREACHABLE; g.n()];
    let mut next = 0;
    for s in 0..g.n() {
        if label[s] != UNREACHABLE {
            continue;
        }
        label[s] = next;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &w in g.neighbors(u) {
                if label[w] == UNREACHABLE {
                    label[w] = next;
                    stack.push(w);
                }
            }
        }
        next += 1;
    }
    label
}

pub fn connected_components(g: &Graph) -> usize {
    component_labels(g).into_iter().max().map_or(0, |m| m + 1)
}

pub fn is_connected(g: &Graph) -> bool {
    connected_components(g) == 1
}

/// Maximum eccentricity, or `None` when the graph is disconnected.
pub fn diameter(g: &Graph) -> Option<usize> {
    let mut best = 0;
    for s in 0..g.n() {
        for d in bfs_distances(g, s) {
            if d == UNREACHABLE {
                return None;
            }
            best = best.max(d);
        }
    }
    Some(best)
}

/// Length of a shortest cycle, or `None` for forests.
pub fn girth(g: &Graph) -> Option<usize> {
    let n = g.n();
    let mut best = UNREACHABLE;
    let mut dist = vec![UNREACHABLE; n];
    let mut parent = vec![UNREACHABLE; n];
    let mut queue = VecDeque::new();
    for root in 0..n {
        dist.fill(UNREACHABLE);
        parent.fill(UNREACHABLE);
        queue.clear();
        dist[root] = 0;
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            // Any cycle found from here is at least this long.
            if 2 * dist[u] + 1 >= best {
                break;
            }
            for &w in g.neighbors(u) {
                if dist[w] == UNREACHABLE {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    queue.push_back(w);
                } else if parent[u] != w {
                    best = best.min(dist[u] + dist[w] + 1);
                }
            }
        }
    }
    (best != UNREACHABLE).then_some(best)
}

/// Sum of distances over unordered pairs, `None` when disconnected.
pub fn wiener_index(g: &Graph) -> Option<u64> {
    let mut total = 0u64;
    for s in 0..g.n() {
        for (t, d) in bfs_distances(g, s).into_iter().enumerate() {
            if d == UNREACHABLE {
                return None;
            }
            if t > s {
                total += d as u64;
            }
        }
    }
    Some(total)
}

/// `½ Σ_{u<v} (d + d²)`, `None` when disconnected.
pub fn hyper_wiener_index(g: &Graph) -> Option<f64> {
    let mut twice = 0u64;
    for s in 0..g.n() {
        for (t, d) in bfs_distances(g, s).into_iter().enumerate() {
            if d == UNREACHABLE {
                return None;
            }
            if t > s {
                let d = d as u64;
                twice += d + d * d;
            }
        }
    }
    Some(twice as f64 / 2.0)
}
