//! Graph strength: the minimum over vertex partitions `P` with `|P| ≥ 2` of
//! (edges crossing `P`) / (`|P|` − 1).
//!
//! Exact search over set partitions in restricted-growth order. The search
//! keeps a running count of crossing edges and prunes a branch once even
//! the most favourable completion (every remaining vertex in its own block,
//! no further crossing edges) cannot beat the incumbent.

use num::rational::Ratio;

use crate::error::{Error, Result};
use crate::graph::Graph;

use super::distance::is_connected;

pub const DEFAULT_LIMIT: usize = 12;

/// `None` when the graph is disconnected or has a single node.
pub fn strength(g: &Graph, limit: usize) -> Result<Option<Ratio<i64>>> {
    let n = g.n();
    if n < 2 || !is_connected(g) {
        return Ok(None);
    }
    if n > limit {
        return Err(Error::Size {
            what: "strength".into(),
            n,
            limit,
        });
    }
    // Earlier neighbours of each vertex, for incremental crossing counts.
    let earlier: Vec<Vec<usize>> = (0..n)
        .map(|v| g.neighbors(v).iter().copied().filter(|&w| w < v).collect())
        .collect();
    let m = g.edge_count() as i64;
    let min_deg = g.degrees().into_iter().min().unwrap_or(0) as i64;
    // All singletons, and one vertex split from the rest.
    let mut best = Ratio::new(m, n as i64 - 1).min(Ratio::from_integer(min_deg));
    let mut block = vec![0usize; n];
    search(&earlier, &mut block, 1, 1, 0, &mut best);
    Ok(Some(best))
}

fn search(
    earlier: &[Vec<usize>],
    block: &mut [usize],
    v: usize,
    blocks: usize,
    crossing: i64,
    best: &mut Ratio<i64>,
) {
    let n = block.len();
    if v == n {
        if blocks >= 2 {
            let r = Ratio::new(crossing, blocks as i64 - 1);
            if r < *best {
                *best = r;
            }
        }
        return;
    }
    let max_blocks = (blocks + n - v) as i64;
    if max_blocks >= 2 && Ratio::new(crossing, max_blocks - 1) >= *best {
        return;
    }
    for b in 0..=blocks {
        let added = earlier[v].iter().filter(|&&w| block[w] != b).count() as i64;
        block[v] = b;
        let nb = if b == blocks { blocks + 1 } else { blocks };
        search(earlier, block, v + 1, nb, crossing + added, best);
    }
}
