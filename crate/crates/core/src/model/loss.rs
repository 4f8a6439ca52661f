//! Masked squared-error objective over graph, node and pair targets.

use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;

/// Normalized targets of one graph.
#[derive(Clone, Debug, PartialEq)]
pub struct Targets {
    /// One entry per graph property; `None` is masked.
    pub graph: Vec<Option<f64>>,
    /// `n × node properties`.
    pub node: Matrix,
    /// Whether each node-property column is defined for this graph.
    pub node_defined: Vec<bool>,
    pub pair: Vec<Matrix>,
    /// Row-major `n × n` definedness per pair property.
    pub pair_defined: Vec<Vec<bool>>,
}

impl Targets {
    /// Graph-level targets only; no node or pair supervision.
    pub fn graph_only(graph: Vec<Option<f64>>, n: usize) -> Targets {
        Targets {
            graph,
            node: Matrix::zeros(n, 0),
            node_defined: Vec::new(),
            pair: Vec::new(),
            pair_defined: Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossWeights {
    pub graph: f64,
    pub node: f64,
    pub pair: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        LossWeights {
            graph: 1.0,
            node: 0.1,
            pair: 0.1,
        }
    }
}

/// Weighted contributions of each term.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LossParts {
    pub graph: f64,
    pub node: f64,
    pub pair: f64,
}

impl LossParts {
    pub fn total(&self) -> f64 {
        self.graph + self.node + self.pair
    }

    pub fn add(&mut self, other: &LossParts) {
        self.graph += other.graph;
        self.node += other.node;
        self.pair += other.pair;
    }

    pub fn scale(&mut self, s: f64) {
        self.graph *= s;
        self.node *= s;
        self.pair *= s;
    }
}

/// Model outputs for one graph.
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub graph: Vec<f64>,
    pub node: Matrix,
    pub pair: Vec<Matrix>,
}

/// `Σ_k (p̂_k − p_k)²` over unmasked graph properties.
pub fn graph_term(pred: &[f64], target: &[Option<f64>]) -> f64 {
    pred.iter()
        .zip(target)
        .filter_map(|(p, t)| t.map(|t| (p - t).powi(2)))
        .sum()
}

/// Mean squared error over defined node-property columns.
pub fn node_term(pred: &Matrix, t: &Targets) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for (k, &defined) in t.node_defined.iter().enumerate() {
        if !defined {
            continue;
        }
        for i in 0..pred.rows() {
            sum += (pred[(i, k)] - t.node[(i, k)]).powi(2);
            count += 1;
        }
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Mean squared error over defined off-diagonal pairs. Heads without
/// targets are ignored.
pub fn pair_term(pred: &[Matrix], t: &Targets) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for (r, (q, defined)) in pred.iter().zip(&t.pair_defined).enumerate() {
        let n = q.rows();
        for i in 0..n {
            for j in 0..n {
                if i != j && defined[i * n + j] {
                    sum += (q[(i, j)] - t.pair[r][(i, j)]).powi(2);
                    count += 1;
                }
            }
        }
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Loss and its gradient with respect to every prediction entry.
pub fn loss_with_gradient(pred: &Prediction, t: &Targets, w: &LossWeights) -> (LossParts, Prediction) {
    let parts = LossParts {
        graph: w.graph * graph_term(&pred.graph, &t.graph),
        node: w.node * node_term(&pred.node, t),
        pair: w.pair * pair_term(&pred.pair, t),
    };

    let dgraph = pred
        .graph
        .iter()
        .zip(&t.graph)
        .map(|(p, t)| t.map_or(0.0, |t| 2.0 * w.graph * (p - t)))
        .collect();

    let n = pred.node.rows();
    let node_count = t.node_defined.iter().filter(|&&d| d).count() * n;
    let mut dnode = Matrix::zeros(n, pred.node.cols());
    if node_count > 0 {
        let s = 2.0 * w.node / node_count as f64;
        for (k, &defined) in t.node_defined.iter().enumerate() {
            if defined {
                for i in 0..n {
                    dnode[(i, k)] = s * (pred.node[(i, k)] - t.node[(i, k)]);
                }
            }
        }
    }

    let pair_count: usize = t
        .pair_defined
        .iter()
        .map(|d| (0..n * n).filter(|&x| x / n != x % n && d[x]).count())
        .sum();
    let dpair = pred
        .pair
        .iter()
        .enumerate()
        .map(|(r, q)| {
            let mut g = Matrix::zeros(n, n);
            if pair_count > 0 && r < t.pair_defined.len() {
                let s = 2.0 * w.pair / pair_count as f64;
                for i in 0..n {
                    for j in 0..n {
                        if i != j && t.pair_defined[r][i * n + j] {
                            g[(i, j)] = s * (q[(i, j)] - t.pair[r][(i, j)]);
                        }
                    }
                }
            }
            g
        })
        .collect();

    (
        parts,
        Prediction {
            graph: dgraph,
            node: dnode,
            pair: dpair,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn targets() -> Targets {
        Targets {
            graph: vec![Some(1.0), None, Some(-1.0)],
            node: Matrix::from_rows(&[vec![0.5], vec![-0.5]]),
            node_defined: vec![true],
            pair: vec![Matrix::from_rows(&[vec![9.0, 1.0], vec![1.0, 9.0]])],
            pair_defined: vec![vec![true; 4]],
        }
    }

    fn exact() -> Prediction {
        Prediction {
            graph: vec![1.0, 123.0, -1.0],
            node: Matrix::from_rows(&[vec![0.5], vec![-0.5]]),
            pair: vec![Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]])],
        }
    }

    #[test]
    fn perfect_prediction_is_zero_and_masks_hold() {
        let (parts, grad) = loss_with_gradient(&exact(), &targets(), &LossWeights::default());
        assert_eq!(parts.total(), 0.0);
        assert_eq!(grad.graph[1], 0.0);
        // Diagonal pair entries never contribute.
        assert!(grad.pair[0].max_abs() == 0.0);
    }

    #[test]
    fn weighted_sum_of_terms() {
        let mut p = exact();
        p.graph[0] = 3.0;
        p.node[(1, 0)] = 0.5;
        p.pair[0][(0, 1)] = 0.0;
        let t = targets();
        let w = LossWeights {
            graph: 1.0,
            node: 0.3,
            pair: 0.7,
        };
        let (parts, _) = loss_with_gradient(&p, &t, &w);
        let expect = graph_term(&p.graph, &t.graph) + 0.3 * node_term(&p.node, &t) + 0.7 * pair_term(&p.pair, &t);
        assert!((parts.total() - expect).abs() <= 1e-12);
        assert_eq!(graph_term(&p.graph, &t.graph), 4.0);
        assert_eq!(node_term(&p.node, &t), 0.5);
        assert_eq!(pair_term(&p.pair, &t), 0.5);
    }
}
