//! Data preparation, optimizers and the deterministic training loop.

use std::io::Write;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Corpus, Graph};
use crate::invariants::{compute_corpus, fit_normalizer, NormalizationStats, Registry};
use crate::linalg::Matrix;
use crate::local::{local_targets, LocalNormalization, LocalTargets, NODE_PROPERTIES, PAIR_PROPERTIES};
use crate::rng::{derived_rng, rng_from_seed};
use crate::spectral::{positional_encoding, EncodingMode};
use crate::stats::r_squared;

use super::loss::{LossParts, LossWeights, Targets};
use super::network::{forward, loss_and_gradient};
use super::params::{ArchConfig, Params, Readout};
use super::{EncoderModel, TrainMetadata};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Optimizer {
    Sgd,
    Adam { beta1: f64, beta2: f64, eps: f64 },
}

impl Optimizer {
    pub fn adam() -> Optimizer {
        Optimizer::Adam {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub optimizer: Optimizer,
    pub weights: LossWeights,
    pub seed: u64,
    pub validation_fraction: f64,
    pub d_in: usize,
    pub d_model: usize,
    pub layers: usize,
    pub heads: usize,
    pub readout: Readout,
    pub node_properties: Vec<String>,
    pub pair_properties: Vec<String>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 50,
            batch_size: 32,
            learning_rate: 1e-3,
            optimizer: Optimizer::adam(),
            weights: LossWeights::default(),
            seed: 0,
            validation_fraction: 0.1,
            d_in: 16,
            d_model: 32,
            layers: 2,
            heads: 4,
            readout: Readout::Mean,
            node_properties: NODE_PROPERTIES.iter().map(|s| s.to_string()).collect(),
            pair_properties: PAIR_PROPERTIES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Argument(m.to_string()));
        if self.batch_size == 0 {
            return bad("batch size must be positive");
        }
        if !(self.learning_rate > 0.0) {
            return bad("learning rate must be positive");
        }
        let w = &self.weights;
        if !(w.graph >= 0.0 && w.node >= 0.0 && w.pair >= 0.0) || w.graph + w.node + w.pair == 0.0 {
            return bad("loss weights must be non-negative and not all zero");
        }
        if !(0.0..1.0).contains(&self.validation_fraction) {
            return bad("validation fraction must lie in [0, 1)");
        }
        Ok(())
    }
}

/// RNG stream for the train/validation split; epoch shuffles use streams
/// `1..=epochs`.
const SPLIT_STREAM: u64 = u64::MAX;

/// One graph ready for the network.
#[derive(Clone, Debug)]
pub struct Example {
    pub id: String,
    pub b: Matrix,
    pub targets: Targets,
}

/// Builds normalized targets in the order of `stats` and `local_norm`.
pub fn make_example(
    g: &Graph,
    graph_targets: Vec<Option<f64>>,
    local: &LocalTargets,
    local_norm: &LocalNormalization,
    d_in: usize,
) -> Result<Example> {
    let n = g.n();
    let local = local_norm.apply(local);
    let node = Matrix::from_fn(n, local.nodes.len(), |i, k| local.nodes[k].values[i]);
    Ok(Example {
        id: g.id().to_string(),
        b: positional_encoding(g, EncodingMode::Truncated(d_in))?.b,
        targets: Targets {
            graph: graph_targets,
            node,
            node_defined: local.nodes.iter().map(|v| !v.masked).collect(),
            pair: local.pairs.iter().map(|p| p.values.clone()).collect(),
            pair_defined: local.pairs.into_iter().map(|p| p.defined).collect(),
        },
    })
}

/// Everything derived from the corpus before optimization starts.
pub struct Prepared {
    pub examples: Vec<Example>,
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub normalization: NormalizationStats,
    pub local_normalization: LocalNormalization,
}

/// Computes properties, splits by seed, fits normalization on the training
/// split and encodes every graph. Graphs with no defined target are dropped.
pub fn prepare(corpus: &Corpus, registry: &Registry, config: &TrainConfig) -> Result<Prepared> {
    let graphs = corpus.graphs();
    let raw = compute_corpus(corpus, registry);
    let mut order: Vec<usize> = (0..graphs.len()).collect();
    order.shuffle(&mut derived_rng(config.seed, SPLIT_STREAM));
    let n_val = (config.validation_fraction * graphs.len() as f64).round() as usize;
    let (val, train) = order.split_at(n_val);
    let mut train = train.to_vec();
    let mut validation = val.to_vec();
    train.sort_unstable();
    validation.sort_unstable();

    let train_raw: Vec<_> = train.iter().map(|&i| raw[i].clone()).collect();
    let normalization = fit_normalizer(&train_raw)?;
    let locals: Vec<LocalTargets> = graphs
        .par_iter()
        .map(|g| local_targets(g, &config.node_properties, &config.pair_properties))
        .collect::<Result<_>>()?;
    let train_locals: Vec<LocalTargets> = train.iter().map(|&i| locals[i].clone()).collect();
    let local_normalization = LocalNormalization::fit(&train_locals);

    let examples: Vec<Example> = graphs
        .par_iter()
        .zip(&raw)
        .zip(&locals)
        .map(|((g, p), l)| {
            let z = normalization.apply(p);
            make_example(g, z.values, l, &local_normalization, config.d_in)
        })
        .collect::<Result<_>>()?;

    let usable = |i: &usize| {
        let ok = examples[*i].targets.graph.iter().any(Option::is_some);
        if !ok {
            log::warn!("skipping `{}`: every graph-level target is masked", examples[*i].id);
        }
        ok
    };
    let train: Vec<usize> = train.into_iter().filter(usable).collect();
    let validation: Vec<usize> = validation.into_iter().filter(usable).collect();
    Ok(Prepared {
        examples,
        train,
        validation,
        normalization,
        local_normalization,
    })
}

/// Loss and per-property R² of one split.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub split: String,
    pub loss: f64,
    pub parts: LossParts,
    /// Aligned with the model's graph properties; NaN when undefined.
    pub r2: Vec<f64>,
}

/// Mean loss and R² over `idx`, computed in parallel and reduced in order.
pub fn evaluate(params: &Params, arch: &ArchConfig, w: &LossWeights, examples: &[Example], idx: &[usize]) -> Result<(LossParts, Vec<f64>)> {
    let preds: Vec<(LossParts, Vec<f64>)> = idx
        .par_iter()
        .map(|&i| {
            let e = &examples[i];
            let pred = forward(params, arch, &e.b)?;
            let (parts, _) = super::loss::loss_with_gradient(&pred, &e.targets, w);
            Ok((parts, pred.graph))
        })
        .collect::<Result<_>>()?;
    let mut total = LossParts::default();
    for (p, _) in &preds {
        total.add(p);
    }
    if !preds.is_empty() {
        total.scale(1.0 / preds.len() as f64);
    }
    let r2 = (0..arch.graph_outputs)
        .map(|k| {
            let (mut p, mut t) = (Vec::new(), Vec::new());
            for (j, &i) in idx.iter().enumerate() {
                if let Some(target) = examples[i].targets.graph[k] {
                    p.push(preds[j].1[k]);
                    t.push(target);
                }
            }
            r_squared(&p, &t)
        })
        .collect();
    Ok((total, r2))
}

struct AdamState {
    m: Params,
    v: Params,
    t: i32,
}

fn step(params: &mut Params, grad: &Params, lr: f64, opt: &Optimizer, state: &mut Option<AdamState>, arch: &ArchConfig) {
    match *opt {
        Optimizer::Sgd => params.add_scaled(grad, -lr),
        Optimizer::Adam { beta1, beta2, eps } => {
            let s = state.get_or_insert_with(|| AdamState {
                m: Params::zeros(arch),
                v: Params::zeros(arch),
                t: 0,
            });
            s.t += 1;
            let c1 = 1.0 - beta1.powi(s.t);
            let c2 = 1.0 - beta2.powi(s.t);
            let tensors = params.named_mut().into_iter().zip(grad.named()).zip(s.m.named_mut()).zip(s.v.named_mut());
            for ((((_, p), (_, g)), (_, m)), (_, v)) in tensors {
                let p = p.as_mut_slice();
                let m = m.as_mut_slice();
                let v = v.as_mut_slice();
                for (i, &gi) in g.as_slice().iter().enumerate() {
                    m[i] = beta1 * m[i] + (1.0 - beta1) * gi;
                    v[i] = beta2 * v[i] + (1.0 - beta2) * gi * gi;
                    p[i] -= lr * (m[i] / c1) / ((v[i] / c2).sqrt() + eps);
                }
            }
        }
    }
}

/// Trained model, metric log and the reason training stopped early, if any.
pub struct TrainOutcome {
    pub model: EncoderModel,
    pub log: Vec<EpochMetrics>,
    pub aborted: Option<String>,
}

/// Minimizes the weighted objective. Deterministic for a fixed seed and
/// independent of the worker count: per-graph gradients are computed in
/// parallel but summed in batch order.
pub fn train(corpus: &Corpus, registry: &Registry, config: &TrainConfig) -> Result<TrainOutcome> {
    config.validate()?;
    if corpus.len() < 10 {
        return Err(Error::Argument(format!("training needs at least 10 graphs, got {}", corpus.len())));
    }
    let data = prepare(corpus, registry, config)?;
    train_prepared(&data, registry, config)
}

pub fn train_prepared(data: &Prepared, registry: &Registry, config: &TrainConfig) -> Result<TrainOutcome> {
    config.validate()?;
    if data.train.is_empty() {
        return Err(Error::Argument("training split is empty".into()));
    }
    let arch = ArchConfig {
        d_in: config.d_in,
        d_model: config.d_model,
        layers: config.layers,
        heads: config.heads,
        readout: config.readout,
        graph_outputs: data.normalization.len(),
        node_outputs: data.local_normalization.nodes.len(),
        pair_outputs: data.local_normalization.pairs.len(),
    };
    let mut rng = rng_from_seed(config.seed);
    let mut params = Params::init(&arch, &mut rng)?;
    let w = &config.weights;
    let mut log = Vec::new();
    let record = |epoch: usize, params: &Params, log: &mut Vec<EpochMetrics>| -> Result<f64> {
        let mut train_loss = f64::NAN;
        for (split, idx) in [("train", &data.train), ("validation", &data.validation)] {
            if idx.is_empty() {
                continue;
            }
            let (parts, r2) = evaluate(params, &arch, w, &data.examples, idx)?;
            if split == "train" {
                train_loss = parts.total();
            }
            log::info!("epoch {epoch} {split} loss {:.5}", parts.total());
            log.push(EpochMetrics {
                epoch,
                split: split.to_string(),
                loss: parts.total(),
                parts,
                r2,
            });
        }
        Ok(train_loss)
    };
    let mut last_loss = record(0, &params, &mut log)?;
    let mut state = None;
    let mut aborted = None;
    let mut epochs_completed = 0;
    let mut order = data.train.clone();
    for epoch in 1..=config.epochs {
        let good = params.clone();
        order.shuffle(&mut derived_rng(config.seed, epoch as u64));
        let mut failure = None;
        for batch in order.chunks(config.batch_size) {
            let results: Vec<Result<(LossParts, Params)>> = batch
                .par_iter()
                .map(|&i| {
                    let e = &data.examples[i];
                    loss_and_gradient(&params, &arch, &e.b, &e.targets, w)
                })
                .collect();
            let mut grad = Params::zeros(&arch);
            for r in results {
                match r {
                    Ok((_, g)) => grad.add_scaled(&g, 1.0 / batch.len() as f64),
                    Err(e) => {
                        failure = Some(e.to_string());
                        break;
                    }
                }
            }
            if failure.is_some() {
                break;
            }
            step(&mut params, &grad, config.learning_rate, &config.optimizer, &mut state, &arch);
        }
        let loss = match failure {
            None => record(epoch, &params, &mut log)?,
            Some(_) => f64::NAN,
        };
        if !loss.is_finite() {
            let reason = failure.unwrap_or_else(|| format!("training loss became non-finite in epoch {epoch}"));
            log::error!("{reason}; keeping parameters from epoch {}", epoch - 1);
            params = good;
            aborted = Some(reason);
            break;
        }
        last_loss = loss;
        epochs_completed = epoch;
    }
    let final_validation = log
        .iter()
        .rev()
        .find(|m| m.split == "validation" && m.epoch == epochs_completed)
        .map(|m| m.loss);
    let model = EncoderModel {
        arch,
        config: config.clone(),
        graph_properties: data.normalization.names().iter().map(|s| s.to_string()).collect(),
        lovasz_tol: registry.lovasz_tol,
        normalization: data.normalization.clone(),
        local_normalization: data.local_normalization.clone(),
        params,
        metadata: TrainMetadata {
            epochs_completed,
            final_train_loss: last_loss,
            final_validation_loss: final_validation,
            aborted: aborted.clone(),
        },
    };
    Ok(TrainOutcome { model, log, aborted })
}

/// `epoch,split,loss,graph_loss,node_loss,pair_loss,r2_<property>...`;
/// undefined R² values are left empty.
pub fn write_metrics_csv(property_names: &[String], log: &[EpochMetrics], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ["epoch", "split", "loss", "graph_loss", "node_loss", "pair_loss"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(property_names.iter().map(|p| format!("r2_{p}")));
    w.write_record(&header)?;
    for m in log {
        let mut row = vec![
            m.epoch.to_string(),
            m.split.clone(),
            m.loss.to_string(),
            m.parts.graph.to_string(),
            m.parts.node.to_string(),
            m.parts.pair.to_string(),
        ];
        row.extend(m.r2.iter().map(|r| if r.is_finite() { r.to_string() } else { String::new() }));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
