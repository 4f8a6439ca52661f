//! Splittance: the minimum number of edge insertions and deletions that turn
//! a graph into a split graph, by the Hammer–Simeone degree-sequence formula.

use crate::graph::Graph;

pub fn splittance(g: &Graph) -> usize {
    let mut deg = g.degrees();
    deg.sort_unstable_by(|a, b| b.cmp(a));
    // m = max{ i : d_i >= i − 1 } with 1-based i.
    let m = deg
        .iter()
        .enumerate()
        .filter(|&(i, &d)| d + 1 >= i + 1)
        .map(|(i, _)| i + 1)
        .max()
        .unwrap_or(0);
    let head: usize = deg[..m].iter().sum();
    let tail: usize = deg[m..].iter().sum();
    let twice = (m * m.saturating_sub(1) + tail) as i64 - head as i64;
    debug_assert!(twice >= 0 && twice % 2 == 0);
    (twice / 2) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        let mut edges = vec![(0, 1), (1, 2), (0, 2), (2, 3)];
        let paw = Graph::new("paw", "t", 4, edges.drain(..)).unwrap();
        assert_eq!(splittance(&paw), 0);
        assert_eq!(splittance(&Graph::cycle(4)), 1);
        assert_eq!(splittance(&Graph::cycle(5)), 2);
        assert_eq!(splittance(&Graph::complete(5)), 0);
        assert_eq!(splittance(&Graph::empty(5)), 0);
        assert_eq!(splittance(&Graph::empty(1)), 0);
    }
}
