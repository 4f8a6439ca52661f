//! The structural encoder: a small post-norm transformer over truncated
//! Laplacian positional encodings with graph, node and pair regression
//! heads, trained to predict normalized invariants.

pub mod discriminate;
pub mod loss;
pub mod network;
pub mod params;
pub mod train;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::invariants::NormalizationStats;
use crate::linalg::Matrix;
use crate::local::LocalNormalization;
use crate::spectral::{positional_encoding, EncodingMode};

pub use discriminate::{discrimination_experiment, DiscriminationReport};
pub use loss::{LossParts, LossWeights, Prediction, Targets};
pub use network::{encode, forward, gradient_check, loss_and_gradient, predict, GradientCheck};
pub use params::{ArchConfig, Params, Readout};
pub use train::{train, EpochMetrics, Optimizer, TrainConfig, TrainOutcome};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainMetadata {
    pub epochs_completed: usize,
    pub final_train_loss: f64,
    pub final_validation_loss: Option<f64>,
    pub aborted: Option<String>,
}

/// Trained parameters together with everything needed to reuse them.
#[derive(Clone, Debug, PartialEq)]
pub struct EncoderModel {
    pub arch: ArchConfig,
    pub config: TrainConfig,
    /// Graph-head outputs, in order.
    pub graph_properties: Vec<String>,
    pub lovasz_tol: f64,
    pub normalization: NormalizationStats,
    pub local_normalization: LocalNormalization,
    pub params: Params,
    pub metadata: TrainMetadata,
}

/// Graph embedding (mean-pooled `Z`) and node embeddings `Z`.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding {
    pub graph: Vec<f64>,
    pub nodes: Matrix,
}

const FORMAT: &str = "graphprop-encoder/1";

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    arch: ArchConfig,
    config: TrainConfig,
    graph_properties: Vec<String>,
    lovasz_tol: f64,
    normalization: NormalizationStats,
    local_normalization: LocalNormalization,
    metadata: TrainMetadata,
    parameters: BTreeMap<String, Vec<Vec<f64>>>,
}

impl EncoderModel {
    /// Structural representation of `g`.
    pub fn embed(&self, g: &Graph) -> Result<Embedding> {
        let b = positional_encoding(g, EncodingMode::Truncated(self.arch.d_in))?.b;
        let z = encode(&self.params, &self.arch, &b)?.z;
        let graph = network::pool(&z, Readout::Mean).into_vec();
        Ok(Embedding { graph, nodes: z })
    }

    /// Normalized graph-level predictions `p̂`.
    pub fn predict_normalized(&self, g: &Graph) -> Result<Vec<f64>> {
        let b = positional_encoding(g, EncodingMode::Truncated(self.arch.d_in))?.b;
        Ok(forward(&self.params, &self.arch, &b)?.graph)
    }

    /// Predictions mapped back to raw property units.
    pub fn predict_properties(&self, g: &Graph) -> Result<Vec<(String, f64)>> {
        let z = self.predict_normalized(g)?;
        Ok(self
            .normalization
            .properties
            .iter()
            .zip(z)
            .map(|(s, v)| (s.name.clone(), v * s.std + s.mean))
            .collect())
    }

    pub fn to_json(&self) -> Result<String> {
        let parameters = self
            .params
            .named()
            .into_iter()
            .map(|(name, m)| (name, m.to_rows()))
            .collect();
        let file = ModelFile {
            format: FORMAT.to_string(),
            arch: self.arch.clone(),
            config: self.config.clone(),
            graph_properties: self.graph_properties.clone(),
            lovasz_tol: self.lovasz_tol,
            normalization: self.normalization.clone(),
            local_normalization: self.local_normalization.clone(),
            metadata: self.metadata.clone(),
            parameters,
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<EncoderModel> {
        let file: ModelFile = serde_json::from_str(text)?;
        if file.format != FORMAT {
            return Err(Error::Argument(format!("unsupported model format `{}`", file.format)));
        }
        file.arch.validate()?;
        let mut params = Params::zeros(&file.arch);
        for (name, m) in params.named_mut() {
            let rows = file
                .parameters
                .get(&name)
                .ok_or_else(|| Error::Argument(format!("model file lacks tensor `{name}`")))?;
            let got = (rows.len(), rows.first().map_or(m.cols(), Vec::len));
            if got != m.shape() || rows.iter().any(|r| r.len() != m.cols()) {
                return Err(Error::Shape(format!(
                    "tensor `{name}` has shape {got:?}, expected {:?}",
                    m.shape()
                )));
            }
            for (i, r) in rows.iter().enumerate() {
                m.row_mut(i).copy_from_slice(r);
            }
        }
        if file.parameters.len() != params.named().len() {
            return Err(Error::Argument("model file has unexpected tensors".into()));
        }
        Ok(EncoderModel {
            arch: file.arch,
            config: file.config,
            graph_properties: file.graph_properties,
            lovasz_tol: file.lovasz_tol,
            normalization: file.normalization,
            local_normalization: file.local_normalization,
            params,
            metadata: file.metadata,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<EncoderModel> {
        EncoderModel::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Row-wise concatenation `[e_i | z_i]` of external features and node
/// embeddings.
pub fn fuse(z: &Matrix, e: &Matrix) -> Result<Matrix> {
    if z.rows() != e.rows() {
        return Err(Error::Shape(format!(
            "feature matrix has {} rows, embeddings have {}",
            e.rows(),
            z.rows()
        )));
    }
    let (a, d) = (e.cols(), z.cols());
    Ok(Matrix::from_fn(z.rows(), a + d, |i, j| if j < a { e[(i, j)] } else { z[(i, j - a)] }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fuse_shapes() {
        let z = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let e = Matrix::from_rows(&[vec![9.0], vec![8.0]]);
        let x = fuse(&z, &e).unwrap();
        assert_eq!(x.to_rows(), vec![vec![9.0, 1.0, 2.0], vec![8.0, 3.0, 4.0]]);
        assert_eq!(fuse(&z, &Matrix::zeros(2, 0)).unwrap(), z);
        assert!(matches!(fuse(&z, &Matrix::zeros(3, 1)), Err(Error::Shape(_))));
    }
}
