//! Parameter tensors of the encoder (Θ) and its regression heads (Ψ).

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng::Rng;

/// How node representations are pooled for the graph head.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Readout {
    /// Mean of the node rows.
    Mean,
    /// Mean of the node rows with `ln n` appended.
    MeanAndSize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchConfig {
    /// Positional-encoding columns fed to the input projection.
    pub d_in: usize,
    pub d_model: usize,
    pub layers: usize,
    pub heads: usize,
    pub readout: Readout,
    pub graph_outputs: usize,
    pub node_outputs: usize,
    pub pair_outputs: usize,
}

impl ArchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.d_in == 0 || self.d_model == 0 || self.heads == 0 {
            return Err(Error::Argument("d_in, d_model and heads must be positive".into()));
        }
        if self.d_model % self.heads != 0 {
            return Err(Error::Argument(format!(
                "d_model {} is not divisible by {} heads",
                self.d_model, self.heads
            )));
        }
        Ok(())
    }

    pub(crate) fn pooled_width(&self) -> usize {
        match self.readout {
            Readout::Mean => self.d_model,
            Readout::MeanAndSize => self.d_model + 1,
        }
    }
}

/// One post-norm transformer block.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerParams {
    pub wq: Matrix,
    pub bq: Matrix,
    pub wk: Matrix,
    pub bk: Matrix,
    pub wv: Matrix,
    pub bv: Matrix,
    pub wo: Matrix,
    pub bo: Matrix,
    pub ln1_gain: Matrix,
    pub ln1_bias: Matrix,
    pub ff_w1: Matrix,
    pub ff_b1: Matrix,
    pub ff_w2: Matrix,
    pub ff_b2: Matrix,
    pub ln2_gain: Matrix,
    pub ln2_bias: Matrix,
}

const LAYER_NAMES: [&str; 16] = [
    "wq", "bq", "wk", "bk", "wv", "bv", "wo", "bo", "ln1_gain", "ln1_bias", "ff_w1", "ff_b1", "ff_w2", "ff_b2",
    "ln2_gain", "ln2_bias",
];

impl LayerParams {
    fn refs(&self) -> [&Matrix; 16] {
        [
            &self.wq, &self.bq, &self.wk, &self.bk, &self.wv, &self.bv, &self.wo, &self.bo, &self.ln1_gain,
            &self.ln1_bias, &self.ff_w1, &self.ff_b1, &self.ff_w2, &self.ff_b2, &self.ln2_gain, &self.ln2_bias,
        ]
    }

    fn refs_mut(&mut self) -> [&mut Matrix; 16] {
        [
            &mut self.wq,
            &mut self.bq,
            &mut self.wk,
            &mut self.bk,
            &mut self.wv,
            &mut self.bv,
            &mut self.wo,
            &mut self.bo,
            &mut self.ln1_gain,
            &mut self.ln1_bias,
            &mut self.ff_w1,
            &mut self.ff_b1,
            &mut self.ff_w2,
            &mut self.ff_b2,
            &mut self.ln2_gain,
            &mut self.ln2_bias,
        ]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Params {
    pub input_w: Matrix,
    pub input_b: Matrix,
    pub layers: Vec<LayerParams>,
    pub graph_w1: Matrix,
    pub graph_b1: Matrix,
    pub graph_w2: Matrix,
    pub graph_b2: Matrix,
    pub node_w1: Matrix,
    pub node_b1: Matrix,
    pub node_w2: Matrix,
    pub node_b2: Matrix,
    /// One bilinear form per pair property, symmetrized on use.
    pub pair_w: Vec<Matrix>,
    pub pair_b: Matrix,
}

fn uniform(rows: usize, cols: usize, rng: &mut Rng) -> Matrix {
    let bound = 1.0 / (rows.max(1) as f64).sqrt();
    Matrix::from_fn(rows, cols, |_, _| rng.gen_range(-bound..=bound))
}

impl Params {
    /// Zero tensors with the shapes implied by `arch`.
    pub fn zeros(arch: &ArchConfig) -> Params {
        let d = arch.d_model;
        let z = Matrix::zeros;
        let layer = || LayerParams {
            wq: z(d, d),
            bq: z(1, d),
            wk: z(d, d),
            bk: z(1, d),
            wv: z(d, d),
            bv: z(1, d),
            wo: z(d, d),
            bo: z(1, d),
            ln1_gain: z(1, d),
            ln1_bias: z(1, d),
            ff_w1: z(d, 2 * d),
            ff_b1: z(1, 2 * d),
            ff_w2: z(2 * d, d),
            ff_b2: z(1, d),
            ln2_gain: z(1, d),
            ln2_bias: z(1, d),
        };
        Params {
            input_w: z(arch.d_in, d),
            input_b: z(1, d),
            layers: (0..arch.layers).map(|_| layer()).collect(),
            graph_w1: z(arch.pooled_width(), d),
            graph_b1: z(1, d),
            graph_w2: z(d, arch.graph_outputs),
            graph_b2: z(1, arch.graph_outputs),
            node_w1: z(d, d),
            node_b1: z(1, d),
            node_w2: z(d, arch.node_outputs),
            node_b2: z(1, arch.node_outputs),
            pair_w: (0..arch.pair_outputs).map(|_| z(d, d)).collect(),
            pair_b: z(1, arch.pair_outputs),
        }
    }

    /// Weights uniform in ±1/√fan_in, biases zero, layer-norm gains one.
    pub fn init(arch: &ArchConfig, rng: &mut Rng) -> Result<Params> {
        arch.validate()?;
        let mut p = Params::zeros(arch);
        let d = arch.d_model;
        p.input_w = uniform(arch.d_in, d, rng);
        for l in &mut p.layers {
            l.wq = uniform(d, d, rng);
            l.wk = uniform(d, d, rng);
            l.wv = uniform(d, d, rng);
            l.wo = uniform(d, d, rng);
            l.ff_w1 = uniform(d, 2 * d, rng);
            l.ff_w2 = uniform(2 * d, d, rng);
            l.ln1_gain = Matrix::from_fn(1, d, |_, _| 1.0);
            l.ln2_gain = Matrix::from_fn(1, d, |_, _| 1.0);
        }
        p.graph_w1 = uniform(arch.pooled_width(), d, rng);
        p.graph_w2 = uniform(d, arch.graph_outputs, rng);
        p.node_w1 = uniform(d, d, rng);
        p.node_w2 = uniform(d, arch.node_outputs, rng);
        for w in &mut p.pair_w {
            *w = uniform(d, d, rng);
        }
        Ok(p)
    }

    /// Every tensor with a stable dotted name, in a fixed order.
    pub fn named(&self) -> Vec<(String, &Matrix)> {
        let mut out = vec![("input.w".to_string(), &self.input_w), ("input.b".to_string(), &self.input_b)];
        for (i, l) in self.layers.iter().enumerate() {
            for (name, m) in LAYER_NAMES.iter().zip(l.refs()) {
                out.push((format!("layer{i}.{name}"), m));
            }
        }
        out.extend([
            ("graph_head.w1".to_string(), &self.graph_w1),
            ("graph_head.b1".to_string(), &self.graph_b1),
            ("graph_head.w2".to_string(), &self.graph_w2),
            ("graph_head.b2".to_string(), &self.graph_b2),
            ("node_head.w1".to_string(), &self.node_w1),
            ("node_head.b1".to_string(), &self.node_b1),
            ("node_head.w2".to_string(), &self.node_w2),
            ("node_head.b2".to_string(), &self.node_b2),
        ]);
        for (r, w) in self.pair_w.iter().enumerate() {
            out.push((format!("pair_head.w{r}"), w));
        }
        out.push(("pair_head.b".to_string(), &self.pair_b));
        out
    }

    /// Same order as [`named`](Self::named).
    pub fn named_mut(&mut self) -> Vec<(String, &mut Matrix)> {
        let mut out = vec![
            ("input.w".to_string(), &mut self.input_w),
            ("input.b".to_string(), &mut self.input_b),
        ];
        for (i, l) in self.layers.iter_mut().enumerate() {
            for (name, m) in LAYER_NAMES.iter().zip(l.refs_mut()) {
                out.push((format!("layer{i}.{name}"), m));
            }
        }
        out.extend([
            ("graph_head.w1".to_string(), &mut self.graph_w1),
            ("graph_head.b1".to_string(), &mut self.graph_b1),
            ("graph_head.w2".to_string(), &mut self.graph_w2),
            ("graph_head.b2".to_string(), &mut self.graph_b2),
            ("node_head.w1".to_string(), &mut self.node_w1),
            ("node_head.b1".to_string(), &mut self.node_b1),
            ("node_head.w2".to_string(), &mut self.node_w2),
            ("node_head.b2".to_string(), &mut self.node_b2),
        ]);
        for (r, w) in self.pair_w.iter_mut().enumerate() {
            out.push((format!("pair_head.w{r}"), w));
        }
        out.push(("pair_head.b".to_string(), &mut self.pair_b));
        out
    }

    pub fn parameter_count(&self) -> usize {
        self.named().iter().map(|(_, m)| m.rows() * m.cols()).sum()
    }

    /// `self += s · other`, tensor by tensor.
    pub fn add_scaled(&mut self, other: &Params, s: f64) {
        for ((_, a), (_, b)) in self.named_mut().into_iter().zip(other.named()) {
            a.add_assign_scaled(b, s);
        }
    }

    /// Name of the first tensor holding a non-finite entry.
    pub fn first_non_finite(&self) -> Option<String> {
        self.named().into_iter().find(|(_, m)| !m.is_finite()).map(|(n, _)| n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    fn arch() -> ArchConfig {
        ArchConfig {
            d_in: 4,
            d_model: 8,
            layers: 2,
            heads: 2,
            readout: Readout::Mean,
            graph_outputs: 3,
            node_outputs: 2,
            pair_outputs: 1,
        }
    }

    #[test]
    fn names_are_unique_and_aligned() {
        let mut p = Params::init(&arch(), &mut rng_from_seed(0)).unwrap();
        let names: Vec<String> = p.named().into_iter().map(|(n, _)| n).collect();
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), names.len());
        let mut_names: Vec<String> = p.named_mut().into_iter().map(|(n, _)| n).collect();
        assert_eq!(names, mut_names);
        assert_eq!(names.len(), 2 + 2 * 16 + 8 + 1 + 1);
    }

    #[test]
    fn rejects_indivisible_heads() {
        let mut a = arch();
        a.heads = 3;
        assert!(Params::init(&a, &mut rng_from_seed(0)).is_err());
    }
}
