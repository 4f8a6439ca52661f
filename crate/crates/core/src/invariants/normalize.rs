//! Per-property z-scoring fitted over a corpus of property vectors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::PropertyVector;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyStats {
    pub name: String,
    pub mean: f64,
    /// Population standard deviation, always > 0.
    pub std: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizationStats {
    pub properties: Vec<PropertyStats>,
    /// Properties left out for zero variance or too few values.
    pub dropped: Vec<String>,
    pub fingerprint: String,
}

/// FNV-1a over the names and raw value bits of the fitting vectors.
fn fingerprint(vectors: &[PropertyVector]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut feed = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    for p in vectors {
        for (name, v) in p.names.iter().zip(&p.values) {
            feed(name.as_bytes());
            match v {
                Some(x) => feed(&x.to_bits().to_le_bytes()),
                None => feed(b"-"),
            }
        }
    }
    format!("{h:016x}")
}

/// Fits mean and population standard deviation per property over the
/// unmasked entries. All vectors must share the first vector's names.
pub fn fit_normalizer(vectors: &[PropertyVector]) -> Result<NormalizationStats> {
    let first = vectors
        .first()
        .ok_or_else(|| Error::Argument("cannot fit normalization on an empty corpus".into()))?;
    if vectors.iter().any(|p| p.names != first.names) {
        return Err(Error::Argument("property vectors use different registries".into()));
    }
    if vectors.iter().any(|p| p.is_normalized()) {
        return Err(Error::Argument("fit on raw, not normalized, property vectors".into()));
    }
    let mut properties = Vec::new();
    let mut dropped = Vec::new();
    for (k, name) in first.names.iter().enumerate() {
        let vals: Vec<f64> = vectors.iter().filter_map(|p| p.values[k]).collect();
        if vals.len() < 2 {
            log::warn!("dropping `{name}`: fewer than two graphs contribute");
            dropped.push(name.clone());
            continue;
        }
        let count = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / count;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / count;
        let std = var.sqrt();
        if !(std > 1e-12 * mean.abs().max(1.0)) {
            log::warn!("dropping `{name}`: zero variance over the corpus");
            dropped.push(name.clone());
            continue;
        }
        properties.push(PropertyStats {
            name: name.clone(),
            mean,
            std,
        });
    }
    Ok(NormalizationStats {
        properties,
        dropped,
        fingerprint: fingerprint(vectors),
    })
}

impl NormalizationStats {
    pub fn names(&self) -> Vec<&str> {
        self.properties.iter().map(|p| p.name.as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.properties.len()
    }

    pub fn is_empty(&self) -> bool {
        self.properties.is_empty()
    }

    /// Z-scores the retained properties of a raw vector, in stats order.
    /// Properties missing from `p` come out masked.
    pub fn apply(&self, p: &PropertyVector) -> PropertyVector {
        let mut out = PropertyVector {
            names: Vec::with_capacity(self.len()),
            values: Vec::with_capacity(self.len()),
            status: Vec::with_capacity(self.len()),
            normalized_with: Some(self.fingerprint.clone()),
        };
        for s in &self.properties {
            out.names.push(s.name.clone());
            match p.index_of(&s.name) {
                Some(i) => {
                    out.values.push(p.values[i].map(|v| (v - s.mean) / s.std));
                    out.status.push(p.status[i].clone());
                }
                None => {
                    out.values.push(None);
                    out.status.push(super::PropertyStatus::Failed("not computed".into()));
                }
            }
        }
        out
    }

    /// Like [`apply`](Self::apply) but warns when the caller expected stats
    /// fitted on a different corpus. Returns the warning, if any.
    pub fn apply_expecting(&self, p: &PropertyVector, expected_fingerprint: &str) -> (PropertyVector, Option<String>) {
        let warning = (expected_fingerprint != self.fingerprint).then(|| {
            let msg = format!(
                "normalization fingerprint {} does not match expected {}",
                self.fingerprint, expected_fingerprint
            );
            log::warn!("{msg}");
            msg
        });
        (self.apply(p), warning)
    }

    /// Maps normalized values back to raw units.
    pub fn denormalize(&self, name: &str, z: f64) -> Option<f64> {
        self.properties.iter().find(|p| p.name == name).map(|s| z * s.std + s.mean)
    }

    /// `{property: {mean, std}}`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for s in &self.properties {
            map.insert(s.name.clone(), serde_json::json!({ "mean": s.mean, "std": s.std }));
        }
        serde_json::Value::Object(map)
    }
}
