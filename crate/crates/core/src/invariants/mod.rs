//! Graph-level invariants, the registry that orders them into property
//! vectors, corpus normalization, and brute-force oracles for verification.

pub mod cliques;
pub mod distance;
pub mod fractional;
pub mod lovasz;
pub mod lp;
pub mod normalize;
pub mod oracle;
pub mod sdp_ipm;
pub mod splittance;
pub mod strength;
pub mod verify;

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Corpus, Graph};
use crate::spectral;

pub use normalize::{fit_normalizer, NormalizationStats};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueKind {
    Integer,
    Rational,
    Real,
}

/// Which graphs a property is defined on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Applicability {
    Any,
    Connected,
    /// Connected with at least two nodes.
    ConnectedNontrivial,
    HasCycle,
    AtLeastTwoNodes,
}

impl Applicability {
    /// `Err(reason)` when `g` is outside the domain.
    pub fn check(self, g: &Graph) -> std::result::Result<(), String> {
        let connected = || distance::is_connected(g);
        let ok = match self {
            Applicability::Any => true,
            Applicability::Connected => connected(),
            Applicability::ConnectedNontrivial => g.n() >= 2 && connected(),
            Applicability::HasCycle => {
                g.edge_count() + distance::connected_components(g) > g.n()
            }
            Applicability::AtLeastTwoNodes => g.n() >= 2,
        };
        if ok {
            Ok(())
        } else {
            Err(match self {
                Applicability::Any => unreachable!(),
                Applicability::Connected => "graph is disconnected",
                Applicability::ConnectedNontrivial => "graph is disconnected or has one node",
                Applicability::HasCycle => "graph is a forest",
                Applicability::AtLeastTwoNodes => "graph has one node",
            }
            .to_string())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyDescriptor {
    pub name: String,
    pub applicability: Applicability,
    pub kind: ValueKind,
    /// Largest node count the exact path accepts; `None` means unbounded.
    pub exact_size_limit: Option<usize>,
}

impl PropertyDescriptor {
    fn new(name: &str, applicability: Applicability, kind: ValueKind, limit: Option<usize>) -> Self {
        PropertyDescriptor {
            name: name.to_string(),
            applicability,
            kind,
            exact_size_limit: limit,
        }
    }
}

pub const NODE_COUNT: &str = "node_count";
pub const EDGE_COUNT: &str = "edge_count";
pub const CONNECTED_COMPONENTS: &str = "connected_components";
pub const DIAMETER: &str = "diameter";
pub const GIRTH: &str = "girth";
pub const INDEPENDENCE_NUMBER: &str = "independence_number";
pub const CLIQUE_NUMBER: &str = "clique_number";
pub const LOVASZ_NUMBER: &str = "lovasz_number";
pub const FRACTIONAL_CHROMATIC_NUMBER: &str = "fractional_chromatic_number";
pub const WIENER_INDEX: &str = "wiener_index";
pub const HYPER_WIENER_INDEX: &str = "hyper_wiener_index";
pub const PARRY_SULLIVAN: &str = "parry_sullivan";
pub const SPLITTANCE: &str = "splittance";
pub const STRENGTH: &str = "strength";
pub const FIEDLER_VALUE: &str = "fiedler_value";

/// An ordered set of properties with unique names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Registry {
    descriptors: Vec<PropertyDescriptor>,
    pub lovasz_tol: f64,
}

impl Default for Registry {
    fn default() -> Self {
        use Applicability::*;
        use ValueKind::*;
        Registry {
            descriptors: vec![
                PropertyDescriptor::new(NODE_COUNT, Any, Integer, None),
                PropertyDescriptor::new(EDGE_COUNT, Any, Integer, None),
                PropertyDescriptor::new(CONNECTED_COMPONENTS, Any, Integer, None),
                PropertyDescriptor::new(DIAMETER, Connected, Integer, None),
                PropertyDescriptor::new(GIRTH, HasCycle, Integer, None),
                PropertyDescriptor::new(INDEPENDENCE_NUMBER, Any, Integer, Some(40)),
                PropertyDescriptor::new(CLIQUE_NUMBER, Any, Integer, Some(40)),
                PropertyDescriptor::new(LOVASZ_NUMBER, Any, Real, None),
                PropertyDescriptor::new(FRACTIONAL_CHROMATIC_NUMBER, Any, Rational, Some(fractional::DEFAULT_LIMIT)),
                PropertyDescriptor::new(WIENER_INDEX, Connected, Integer, None),
                PropertyDescriptor::new(HYPER_WIENER_INDEX, Connected, Real, None),
                PropertyDescriptor::new(PARRY_SULLIVAN, Any, Real, None),
                PropertyDescriptor::new(SPLITTANCE, Any, Integer, None),
                PropertyDescriptor::new(STRENGTH, ConnectedNontrivial, Rational, Some(strength::DEFAULT_LIMIT)),
                PropertyDescriptor::new(FIEDLER_VALUE, AtLeastTwoNodes, Real, None),
            ],
            lovasz_tol: lovasz::DEFAULT_TOL,
        }
    }
}

impl Registry {
    pub fn new(descriptors: Vec<PropertyDescriptor>) -> Result<Registry> {
        for (i, d) in descriptors.iter().enumerate() {
            if !KNOWN.contains(&d.name.as_str()) {
                return Err(Error::Argument(format!("unknown property `{}`", d.name)));
            }
            if descriptors[..i].iter().any(|e| e.name == d.name) {
                return Err(Error::Argument(format!("duplicate property `{}`", d.name)));
            }
        }
        Ok(Registry {
            descriptors,
            lovasz_tol: lovasz::DEFAULT_TOL,
        })
    }

    /// The default descriptors restricted to `names`, in the given order.
    pub fn select(names: &[&str]) -> Result<Registry> {
        let all = Registry::default();
        let picked = names
            .iter()
            .map(|n| {
                all.get(n)
                    .cloned()
                    .ok_or_else(|| Error::Argument(format!("unknown property `{n}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Registry::new(picked)
    }

    pub fn descriptors(&self) -> &[PropertyDescriptor] {
        &self.descriptors
    }

    pub fn names(&self) -> Vec<&str> {
        self.descriptors.iter().map(|d| d.name.as_str()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&PropertyDescriptor> {
        self.descriptors.iter().find(|d| d.name == name)
    }

    pub fn len(&self) -> usize {
        self.descriptors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.descriptors.is_empty()
    }
}

const KNOWN: [&str; 15] = [
    NODE_COUNT,
    EDGE_COUNT,
    CONNECTED_COMPONENTS,
    DIAMETER,
    GIRTH,
    INDEPENDENCE_NUMBER,
    CLIQUE_NUMBER,
    LOVASZ_NUMBER,
    FRACTIONAL_CHROMATIC_NUMBER,
    WIENER_INDEX,
    HYPER_WIENER_INDEX,
    PARRY_SULLIVAN,
    SPLITTANCE,
    STRENGTH,
    FIEDLER_VALUE,
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "lowercase")]
pub enum PropertyStatus {
    Applicable,
    /// Outside the property's domain (e.g. diameter of a disconnected graph).
    Inapplicable(String),
    /// Within the domain but not computed (size limit, solver failure).
    Failed(String),
}

/// Property values in registry order. Masked entries carry no value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyVector {
    pub names: Vec<String>,
    pub values: Vec<Option<f64>>,
    pub status: Vec<PropertyStatus>,
    /// Fingerprint of the normalization stats applied, if any.
    pub normalized_with: Option<String>,
}

impl PropertyVector {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.index_of(name).and_then(|i| self.values[i])
    }

    pub fn status_of(&self, name: &str) -> Option<&PropertyStatus> {
        self.index_of(name).map(|i| &self.status[i])
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized_with.is_some()
    }

    /// 1.0 where a value is present, 0.0 where masked.
    pub fn mask(&self) -> Vec<f64> {
        self.values.iter().map(|v| if v.is_some() { 1.0 } else { 0.0 }).collect()
    }
}

fn size_check(name: &str, g: &Graph, limit: Option<usize>) -> Result<()> {
    match limit {
        Some(limit) if g.n() > limit => Err(Error::Size {
            what: name.to_string(),
            n: g.n(),
            limit,
        }),
        _ => Ok(()),
    }
}

/// Fast-path value of one property, `Ok(None)` when inapplicable.
pub fn compute_property(desc: &PropertyDescriptor, g: &Graph, lovasz_tol: f64) -> Result<Option<f64>> {
    if desc.applicability.check(g).is_err() {
        return Ok(None);
    }
    size_check(&desc.name, g, desc.exact_size_limit)?;
    let v = match desc.name.as_str() {
        NODE_COUNT => Some(g.n() as f64),
        EDGE_COUNT => Some(g.edge_count() as f64),
        CONNECTED_COMPONENTS => Some(distance::connected_components(g) as f64),
        DIAMETER => distance::diameter(g).map(|d| d as f64),
        GIRTH => distance::girth(g).map(|d| d as f64),
        INDEPENDENCE_NUMBER => Some(cliques::independence_number(g) as f64),
        CLIQUE_NUMBER => Some(cliques::clique_number(g) as f64),
        LOVASZ_NUMBER => Some(lovasz::lovasz_number(g, lovasz_tol)?.value),
        FRACTIONAL_CHROMATIC_NUMBER => {
            let limit = desc.exact_size_limit.unwrap_or(fractional::DEFAULT_LIMIT);
            Some(fractional::fractional_chromatic_number(g, limit)?.value)
        }
        WIENER_INDEX => distance::wiener_index(g).map(|w| w as f64),
        HYPER_WIENER_INDEX => distance::hyper_wiener_index(g),
        PARRY_SULLIVAN => Some(parry_sullivan(g)),
        SPLITTANCE => Some(splittance::splittance(g) as f64),
        STRENGTH => {
            let limit = desc.exact_size_limit.unwrap_or(strength::DEFAULT_LIMIT);
            strength::strength(g, limit)?.map(|r| *r.numer() as f64 / *r.denom() as f64)
        }
        FIEDLER_VALUE => spectral::fiedler_value(g)?,
        other => return Err(Error::Argument(format!("unknown property `{other}`"))),
    };
    Ok(v)
}

/// `det(I − A)` by LU with partial pivoting.
pub fn parry_sullivan(g: &Graph) -> f64 {
    let a = g.adjacency();
    crate::linalg::Matrix::identity(g.n()).sub(&a).determinant()
}

/// Evaluates every registered property. Failures are recorded in the
/// status list and never abort the batch.
pub fn compute_all(g: &Graph, registry: &Registry) -> PropertyVector {
    let mut names = Vec::with_capacity(registry.len());
    let mut values = Vec::with_capacity(registry.len());
    let mut status = Vec::with_capacity(registry.len());
    for desc in registry.descriptors() {
        names.push(desc.name.clone());
        if let Err(reason) = desc.applicability.check(g) {
            values.push(None);
            status.push(PropertyStatus::Inapplicable(reason));
            continue;
        }
        match compute_property(desc, g, registry.lovasz_tol) {
            Ok(Some(v)) => {
                values.push(Some(v));
                status.push(PropertyStatus::Applicable);
            }
            Ok(None) => {
                values.push(None);
                status.push(PropertyStatus::Inapplicable("undefined on this graph".into()));
            }
            Err(e) => {
                // Size-limit skips are expected in batch mode; callers
                // summarize them from the status list.
                if matches!(e, Error::Size { .. }) {
                    log::debug!("{} on graph `{}`: {e}", desc.name, g.id());
                } else {
                    log::warn!("{} on graph `{}`: {e}", desc.name, g.id());
                }
                values.push(None);
                status.push(PropertyStatus::Failed(e.to_string()));
            }
        }
    }
    PropertyVector {
        names,
        values,
        status,
        normalized_with: None,
    }
}

/// [`compute_all`] over a corpus, parallel per graph, results in corpus order.
pub fn compute_corpus(corpus: &Corpus, registry: &Registry) -> Vec<PropertyVector> {
    corpus
        .graphs()
        .par_iter()
        .map(|g| compute_all(g, registry))
        .collect()
}

/// CSV with an `id` column then one column per property; masked cells empty.
pub fn write_csv(ids: &[&str], vectors: &[PropertyVector], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let names: Vec<&str> = vectors.first().map_or(Vec::new(), |p| p.names.iter().map(String::as_str).collect());
    let mut header = vec!["id"];
    header.extend(names.iter().copied());
    w.write_record(&header)?;
    for (id, p) in ids.iter().zip(vectors) {
        let mut row = vec![id.to_string()];
        row.extend(p.values.iter().map(|v| v.map_or(String::new(), |x| format!("{x}"))));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
