//! Cross-domain mixup of adjacency matrices and seeded synthetic corpora.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generate::{generate, GraphModel};
use crate::graph::{Corpus, Graph, Provenance};
use crate::rng::{derive_seed, derived_rng, rng_from_seed};

/// How mixed edge weights in `[0, 1]` become edges.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum Resolution {
    /// Edge iff the weight is at least the cutoff.
    Threshold { cutoff: f64 },
    /// Edge with probability equal to the weight.
    Bernoulli { seed: u64 },
}

impl Default for Resolution {
    fn default() -> Self {
        Resolution::Threshold { cutoff: 0.5 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixupSpec {
    pub lambda: f64,
    pub resolution: Resolution,
}

impl MixupSpec {
    pub fn threshold(lambda: f64) -> MixupSpec {
        MixupSpec {
            lambda,
            resolution: Resolution::default(),
        }
    }

    pub fn bernoulli(lambda: f64, seed: u64) -> MixupSpec {
        MixupSpec {
            lambda,
            resolution: Resolution::Bernoulli { seed },
        }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::Argument(format!("mixup lambda {} outside [0, 1]", self.lambda)));
        }
        Ok(())
    }
}

/// `λ·A₁ + (1 − λ)·A₂` on the zero-padded adjacencies, resolved to a simple
/// graph. Node `i` of one parent is aligned with node `i` of the other.
pub fn mixup(g1: &Graph, g2: &Graph, spec: &MixupSpec) -> Result<Graph> {
    spec.validate()?;
    let n = g1.n().max(g2.n());
    let lambda = spec.lambda;
    let mut rng = match spec.resolution {
        Resolution::Bernoulli { seed } => Some(rng_from_seed(seed)),
        Resolution::Threshold { .. } => None,
    };
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let a1 = (u < g1.n() && v < g1.n() && g1.has_edge(u, v)) as u8 as f64;
            let a2 = (u < g2.n() && v < g2.n() && g2.has_edge(u, v)) as u8 as f64;
            let w = lambda * a1 + (1.0 - lambda) * a2;
            let keep = match (&spec.resolution, rng.as_mut()) {
                (Resolution::Threshold { cutoff }, _) => w >= *cutoff,
                (Resolution::Bernoulli { .. }, Some(r)) => r.gen::<f64>() < w,
                (Resolution::Bernoulli { .. }, None) => unreachable!(),
            };
            if keep {
                edges.push((u, v));
            }
        }
    }
    let id = format!("mixup:{}+{}", g1.id(), g2.id());
    let domain = format!("mixup({},{})", g1.domain(), g2.domain());
    Ok(Graph::new(id, domain, n, edges)?.with_provenance(Provenance {
        parents: [g1.id().to_string(), g2.id().to_string()],
        lambda,
    }))
}

/// Adds `pairs` mixup graphs built from uniformly drawn cross-domain pairs.
/// Pair `k` depends only on `(seed, k)`.
pub fn augment_corpus(corpus: &Corpus, pairs: usize, spec: &MixupSpec, seed: u64) -> Result<Corpus> {
    spec.validate()?;
    let domains = corpus.domains();
    if domains.len() < 2 {
        return Err(Error::Argument(format!(
            "cross-domain augmentation needs at least two domains, found {}",
            domains.len()
        )));
    }
    let mixed: Vec<Graph> = (0..pairs)
        .into_par_iter()
        .map(|k| {
            let mut rng = derived_rng(seed, k as u64);
            let d1 = rng.gen_range(0..domains.len());
            let mut d2 = rng.gen_range(0..domains.len() - 1);
            if d2 >= d1 {
                d2 += 1;
            }
            let pick = |rng: &mut crate::rng::Rng, d: usize| {
                let idx = &domains[d].1;
                &corpus.graphs()[idx[rng.gen_range(0..idx.len())]]
            };
            let g1 = pick(&mut rng, d1);
            let g2 = pick(&mut rng, d2);
            let spec_k = match spec.resolution {
                Resolution::Bernoulli { seed: s } => MixupSpec::bernoulli(spec.lambda, derive_seed(s, k as u64)),
                Resolution::Threshold { .. } => *spec,
            };
            let g = mixup(g1, g2, &spec_k)?;
            let id = format!("mixup{k}:{}+{}", g1.id(), g2.id());
            Ok(g.with_id(id))
        })
        .collect::<Result<_>>()?;
    Ok(corpus.clone().extend(mixed))
}

/// `count` graphs from one model with node counts drawn uniformly from
/// `n_min..=n_max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub model: GraphModel,
    pub count: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub seed: u64,
}

impl SynthSpec {
    fn validate(&self) -> Result<()> {
        if self.n_min > self.n_max {
            return Err(Error::Argument(format!("size range {}..={} is empty", self.n_min, self.n_max)));
        }
        self.model.with_n(self.n_min).validate()?;
        self.model.with_n(self.n_max).validate()
    }
}

/// Generates every spec in order; each generator family forms its own
/// domain. Graph `i` of a spec depends only on `(spec.seed, i)`.
pub fn build_synthetic_corpus(specs: &[SynthSpec]) -> Result<Corpus> {
    let mut graphs = Vec::new();
    for spec in specs {
        spec.validate()?;
        let batch: Vec<Graph> = (0..spec.count)
            .into_par_iter()
            .map(|i| {
                let mut rng = derived_rng(spec.seed, i as u64);
                let n = rng.gen_range(spec.n_min..=spec.n_max);
                let g = generate(spec.model.with_n(n), derive_seed(spec.seed, i as u64))?;
                Ok(g.with_id(format!("{}-{}-{i}", spec.model.family(), spec.seed)))
            })
            .collect::<Result<_>>()?;
        graphs.extend(batch);
    }
    Ok(Corpus::new(graphs))
}

/// The three-family corpus (ER p = 0.3, BA m = 2, WS k = 4 β = 0.2) with
/// `total` graphs split as evenly as possible.
pub fn default_synthetic_specs(total: usize, n_min: usize, n_max: usize, seed: u64) -> Vec<SynthSpec> {
    let models = [
        GraphModel::ErdosRenyi { n: n_min, p: 0.3 },
        GraphModel::BarabasiAlbert { n: n_min, m: 2 },
        GraphModel::WattsStrogatz {
            n: n_min,
            k: 4,
            beta: 0.2,
        },
    ];
    models
        .iter()
        .enumerate()
        .map(|(f, &model)| SynthSpec {
            model,
            count: total / 3 + usize::from(f < total % 3),
            n_min,
            n_max,
            seed: derive_seed(seed, f as u64),
        })
        .collect()
}
