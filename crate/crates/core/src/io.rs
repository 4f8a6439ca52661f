//! Corpus file formats.
//!
//! JSONL holds one graph per line:
//! `{"id": str, "domain": str, "n": int, "edges": [[u, v], ...], "features": [[f64]], "label": int}`
//! with `features` and `label` optional. Augmented graphs additionally carry
//! `parents` and `lambda`.
//!
//! An edge-list directory holds one subdirectory per domain and one file per
//! graph inside it, each line a whitespace-separated `u v` pair. Node labels
//! are remapped to `0..n` in order of first appearance.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Corpus, Graph, Provenance};
use crate::linalg::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorpusFormat {
    Jsonl,
    EdgeListDir,
}

impl FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jsonl" => Ok(CorpusFormat::Jsonl),
            "edge-list-dir" => Ok(CorpusFormat::EdgeListDir),
            other => Err(Error::Argument(format!("unknown corpus format `{other}`"))),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct GraphRecord {
    #[serde(default)]
    id: Option<String>,
    #[serde(default)]
    domain: Option<String>,
    n: usize,
    #[serde(default)]
    edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    features: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parents: Option<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
}

pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<Corpus> {
    match format {
        CorpusFormat::Jsonl => load_jsonl(path),
        CorpusFormat::EdgeListDir => load_edge_list_dir(path).map(|(c, _)| c),
    }
}

pub fn load_jsonl(path: &Path) -> Result<Corpus> {
    let file = fs::File::open(path)?;
    read_jsonl(BufReader::new(file))
}

pub fn read_jsonl(reader: impl BufRead) -> Result<Corpus> {
    let mut graphs = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let rec: GraphRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: lineno,
            msg: e.to_string(),
        })?;
        graphs.push(record_to_graph(rec, lineno)?);
    }
    Ok(Corpus::new(graphs))
}

fn record_to_graph(rec: GraphRecord, lineno: usize) -> Result<Graph> {
    let id = rec.id.unwrap_or_else(|| format!("g{lineno}"));
    let domain = rec.domain.unwrap_or_else(|| "default".to_string());
    let mut g = Graph::new(id.clone(), domain, rec.n, rec.edges.iter().map(|e| (e[0], e[1])))?
        .with_label(rec.label);
    if let Some(rows) = rec.features {
        let width = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::validation(&id, "ragged feature rows"));
        }
        g = g.with_features(Matrix::from_rows(&rows))?;
    }
    if let (Some(parents), Some(lambda)) = (rec.parents, rec.lambda) {
        g = g.with_provenance(Provenance { parents, lambda });
    }
    Ok(g)
}

fn graph_to_record(g: &Graph) -> GraphRecord {
    GraphRecord {
        id: Some(g.id().to_string()),
        domain: Some(g.domain().to_string()),
        n: g.n(),
        edges: g.edges().iter().map(|&(u, v)| [u, v]).collect(),
        features: g.features().map(Matrix::to_rows),
        label: g.label(),
        parents: g.provenance().map(|p| p.parents.clone()),
        lambda: g.provenance().map(|p| p.lambda),
    }
}

pub fn write_jsonl(corpus: &Corpus, mut out: impl Write) -> Result<()> {
    for g in corpus.graphs() {
        serde_json::to_writer(&mut out, &graph_to_record(g))?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn save_jsonl(corpus: &Corpus, path: &Path) -> Result<()> {
    let mut w = std::io::BufWriter::new(fs::File::create(path)?);
    write_jsonl(corpus, &mut w)?;
    w.flush()?;
    Ok(())
}

/// Loads an edge-list directory. Returns the corpus and, per graph, the
/// original node label of every remapped index.
pub fn load_edge_list_dir(root: &Path) -> Result<(Corpus, Vec<Vec<String>>)> {
    let mut domains: Vec<_> = fs::read_dir(root)?
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_dir())
        .collect();
    domains.sort_by_key(|e| e.file_name());

    let mut graphs = Vec::new();
    let mut maps = Vec::new();
    for dom in domains {
        let domain = dom.file_name().to_string_lossy().into_owned();
        let mut files: Vec<_> = fs::read_dir(dom.path())?
            .filter_map(|e| e.ok())
            .filter(|e| e.path().is_file())
            .collect();
        files.sort_by_key(|e| e.file_name());
        for f in files {
            let stem = f
                .path()
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let id = format!("{domain}/{stem}");
            let (g, map) = read_edge_list(BufReader::new(fs::File::open(f.path())?), &id, &domain)?;
            graphs.push(g);
            maps.push(map);
        }
    }
    Ok((Corpus::new(graphs), maps))
}

pub fn read_edge_list(reader: impl BufRead, id: &str, domain: &str) -> Result<(Graph, Vec<String>)> {
    let mut labels: Vec<String> = Vec::new();
    let mut index = std::collections::HashMap::new();
    let mut edges = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = t.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("{id}: expected `u v`, found {} fields", toks.len()),
            });
        }
        let mut ends = [0usize; 2];
        for (k, tok) in toks.iter().enumerate() {
            let next = labels.len();
            let idx = *index.entry(tok.to_string()).or_insert(next);
            if idx == next {
                labels.push(tok.to_string());
            }
            ends[k] = idx;
        }
        edges.push((ends[0], ends[1]));
    }
    if labels.is_empty() {
        return Err(Error::validation(id, "edge list has no edges"));
    }
    let g = Graph::new(id, domain, labels.len(), edges)?;
    Ok((g, labels))
}
