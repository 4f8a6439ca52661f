//! Weisfeiler–Lehman subtree kernel, kernel-matrix embeddings and
//! in-domain / cross-domain similarity statistics.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::augment::SynthSpec;
use crate::error::{Error, Result};
use crate::generate::GraphModel;
use crate::graph::{Corpus, Graph};
use crate::linalg::Matrix;
use crate::rng::derive_seed;
use crate::spectral::eigh;

pub const DEFAULT_ITERATIONS: usize = 3;
pub const DEFAULT_ENERGY: f64 = 0.99;

/// Sparse label histogram keyed by `(iteration, label id)`.
pub type Histogram = BTreeMap<(usize, u64), u64>;

/// WL label histograms for iterations `0..=h`, with labels shared across
/// all given graphs. Initial labels are node degrees.
pub fn wl_histograms(graphs: &[&Graph], h: usize) -> Vec<Histogram> {
    let mut labels: Vec<Vec<u64>> = graphs
        .iter()
        .map(|g| g.degrees().into_iter().map(|d| d as u64).collect())
        .collect();
    let mut hists: Vec<Histogram> = vec![Histogram::new(); graphs.len()];
    let record = |hists: &mut Vec<Histogram>, labels: &[Vec<u64>], it: usize| {
        for (hist, ls) in hists.iter_mut().zip(labels) {
            for &l in ls {
                *hist.entry((it, l)).or_insert(0) += 1;
            }
        }
    };
    record(&mut hists, &labels, 0);
    for it in 1..=h {
        let mut dict: HashMap<(u64, Vec<u64>), u64> = HashMap::new();
        let mut next = Vec::with_capacity(graphs.len());
        for (g, ls) in graphs.iter().zip(&labels) {
            let relabeled = (0..g.n())
                .map(|v| {
                    let mut nb: Vec<u64> = g.neighbors(v).iter().map(|&w| ls[w]).collect();
                    nb.sort_unstable();
                    let fresh = dict.len() as u64;
                    *dict.entry((ls[v], nb)).or_insert(fresh)
                })
                .collect();
            next.push(relabeled);
        }
        labels = next;
        record(&mut hists, &labels, it);
    }
    hists
}

fn histogram_dot(a: &Histogram, b: &Histogram) -> f64 {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small
        .iter()
        .filter_map(|(k, &c)| large.get(k).map(|&d| (c * d) as f64))
        .sum()
}

/// Subtree kernel: sum over iterations of histogram dot products.
pub fn wl_kernel(g1: &Graph, g2: &Graph, h: usize) -> f64 {
    let hs = wl_histograms(&[g1, g2], h);
    histogram_dot(&hs[0], &hs[1])
}

/// Gram matrix of the subtree kernel over a corpus.
pub fn kernel_matrix(graphs: &[Graph], h: usize) -> Result<Matrix> {
    if graphs.is_empty() {
        return Err(Error::Argument("kernel matrix of an empty corpus".into()));
    }
    let refs: Vec<&Graph> = graphs.iter().collect();
    let hists = wl_histograms(&refs, h);
    let n = graphs.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| (0..n).map(|j| histogram_dot(&hists[i], &hists[j])).collect())
        .collect();
    Ok(Matrix::from_rows(&rows))
}

/// `Z = U S^{1/2}` with the leading eigenpairs that cover `energy` of the
/// trace; `energy = 1` keeps every numerically positive eigenpair. Eigenvalues below
/// −1e-8‖K‖ are clipped with a warning; below −1e-3‖K‖ the matrix is
/// rejected.
pub fn kernel_embedding(k: &Matrix, energy: f64) -> Result<Matrix> {
    if !(energy > 0.0 && energy <= 1.0) {
        return Err(Error::Argument(format!("energy fraction {energy} outside (0, 1]")));
    }
    let dec = eigh(k)?;
    let scale = dec.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let lmin = dec.eigenvalues.first().copied().unwrap_or(0.0);
    if lmin < -1e-3 * scale {
        return Err(Error::Data(format!(
            "kernel matrix is far from PSD: smallest eigenvalue {lmin:.3e}, norm {scale:.3e}"
        )));
    }
    if lmin < -1e-8 * scale {
        log::warn!("clipping negative kernel eigenvalue {lmin:.3e}");
    }
    let n = k.rows();
    // Eigenvalues at rounding level count as zero.
    let floor = 16.0 * n as f64 * f64::EPSILON * scale;
    let order: Vec<usize> = (0..n).rev().filter(|&i| dec.eigenvalues[i] > floor).collect();
    let trace: f64 = order.iter().map(|&i| dec.eigenvalues[i]).sum();
    let mut kept = Vec::new();
    let mut acc = 0.0;
    for &i in &order {
        if energy < 1.0 && acc >= energy * trace {
            break;
        }
        kept.push(i);
        acc += dec.eigenvalues[i];
    }
    Ok(Matrix::from_fn(n, kept.len(), |r, c| {
        let i = kept[c];
        dec.eigenvectors[(r, i)] * dec.eigenvalues[i].sqrt()
    }))
}

/// How embeddings are centred before cosine similarity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Centering {
    /// Subtract each column's mean over the corpus.
    Columns,
    /// Subtract each row's own mean (Pearson correlation of rows).
    Rows,
}

/// Pairwise cosine similarity of centred rows. Rows with zero norm after
/// centring give NaN entries.
pub fn similarity_matrix(z: &Matrix, centering: Centering) -> Result<Matrix> {
    let (n, d) = z.shape();
    if n < 2 {
        return Err(Error::Argument("similarity needs at least two rows".into()));
    }
    let mut c = z.clone();
    match centering {
        Centering::Columns => {
            for j in 0..d {
                let m = (0..n).map(|i| z[(i, j)]).sum::<f64>() / n as f64;
                for i in 0..n {
                    c[(i, j)] -= m;
                }
            }
        }
        Centering::Rows => {
            for i in 0..n {
                let m = z.row(i).iter().sum::<f64>() / d.max(1) as f64;
                for v in c.row_mut(i) {
                    *v -= m;
                }
            }
        }
    }
    let norms: Vec<f64> = (0..n).map(|i| crate::linalg::norm(c.row(i))).collect();
    let scale = norms.iter().cloned().fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::Data("every centred embedding row is zero".into()));
    }
    let tiny = 1e-12 * scale;
    Ok(Matrix::from_fn(n, n, |i, j| {
        if norms[i] <= tiny || norms[j] <= tiny {
            f64::NAN
        } else if i == j {
            1.0
        } else {
            let v = crate::linalg::dot(c.row(i), c.row(j)) / (norms[i] * norms[j]);
            v.clamp(-1.0, 1.0)
        }
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockSummary {
    pub domains: Vec<String>,
    /// `M × M` block means; diagonal blocks exclude self-pairs. `None`
    /// where a block has no defined pairs.
    pub block_means: Vec<Vec<Option<f64>>>,
    /// Mean of the diagonal block means.
    pub in_domain_mean: Option<f64>,
    /// Mean of the off-diagonal block means.
    pub cross_domain_mean: Option<f64>,
    /// `cross / in`.
    pub separation_ratio: Option<f64>,
}

fn mean_of(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (mut s, mut c) = (0.0, 0usize);
    for x in xs.filter(|x| x.is_finite()) {
        s += x;
        c += 1;
    }
    (c > 0).then(|| s / c as f64)
}

pub fn block_statistics(sim: &Matrix, domains: &[(String, Vec<usize>)]) -> Result<BlockSummary> {
    let covered: usize = domains.iter().map(|(_, idx)| idx.len()).sum();
    if covered != sim.rows() {
        return Err(Error::Argument(format!(
            "domain partition covers {covered} rows of {}",
            sim.rows()
        )));
    }
    let m = domains.len();
    let block_means: Vec<Vec<Option<f64>>> = (0..m)
        .map(|a| {
            (0..m)
                .map(|b| {
                    let (ia, ib) = (&domains[a].1, &domains[b].1);
                    mean_of(
                        ia.iter()
                            .flat_map(|&i| ib.iter().map(move |&j| (i, j)))
                            .filter(|&(i, j)| i != j)
                            .map(|(i, j)| sim[(i, j)]),
                    )
                })
                .collect()
        })
        .collect();
    let in_domain_mean = mean_of((0..m).filter_map(|a| block_means[a][a]));
    let cross_domain_mean = mean_of(
        (0..m)
            .flat_map(|a| (0..m).map(move |b| (a, b)))
            .filter(|(a, b)| a != b)
            .filter_map(|(a, b)| block_means[a][b]),
    );
    let separation_ratio = match (in_domain_mean, cross_domain_mean) {
        (Some(i), Some(c)) if i != 0.0 => Some(c / i),
        _ => None,
    };
    Ok(BlockSummary {
        domains: domains.iter().map(|(d, _)| d.clone()).collect(),
        block_means,
        in_domain_mean,
        cross_domain_mean,
        separation_ratio,
    })
}

/// Similarity matrix together with its block summary.
#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityReport {
    pub similarity: Matrix,
    pub rank: usize,
    pub summary: BlockSummary,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WlAnalysisConfig {
    pub iterations: usize,
    pub energy: f64,
    pub centering: Centering,
}

impl Default for WlAnalysisConfig {
    fn default() -> Self {
        WlAnalysisConfig {
            iterations: DEFAULT_ITERATIONS,
            energy: DEFAULT_ENERGY,
            centering: Centering::Rows,
        }
    }
}

/// Kernel matrix, embedding, similarity and block statistics in one pass.
pub fn wl_similarity_report(corpus: &Corpus, config: &WlAnalysisConfig) -> Result<SimilarityReport> {
    let k = kernel_matrix(corpus.graphs(), config.iterations)?;
    let z = kernel_embedding(&k, config.energy)?;
    let similarity = similarity_matrix(&z, config.centering)?;
    let summary = block_statistics(&similarity, corpus.domains())?;
    Ok(SimilarityReport {
        similarity,
        rank: z.cols(),
        summary,
    })
}

/// Three structurally distinct families: ER p = 0.2, BA m = 2 and WS k = 4
/// β = 0.1, `per_family` graphs each with n in 10..=30.
pub fn domain_family_specs(per_family: usize, seed: u64) -> Vec<SynthSpec> {
    [
        GraphModel::ErdosRenyi { n: 10, p: 0.2 },
        GraphModel::BarabasiAlbert { n: 10, m: 2 },
        GraphModel::WattsStrogatz {
            n: 10,
            k: 4,
            beta: 0.1,
        },
    ]
    .into_iter()
    .enumerate()
    .map(|(f, model)| SynthSpec {
        model,
        count: per_family,
        n_min: 10,
        n_max: 30,
        seed: derive_seed(seed, f as u64),
    })
    .collect()
}

/// Square CSV without a header; NaN entries are left empty.
pub fn write_matrix_csv(m: &Matrix, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for i in 0..m.rows() {
        w.write_record(m.row(i).iter().map(|v| if v.is_finite() { v.to_string() } else { String::new() }))?;
    }
    w.flush()?;
    Ok(())
}

/// Diverging blue–white–red heatmap over [−1, 1] with domain separators.
pub fn heatmap_svg(sim: &Matrix, domains: &[(String, Vec<usize>)]) -> String {
    let n = sim.rows();
    let cell = (600.0 / n.max(1) as f64).max(1.0);
    let size = cell * n as f64;
    // Rows and columns follow the domain order.
    let order: Vec<usize> = domains.iter().flat_map(|(_, idx)| idx.iter().copied()).collect();
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{w}" viewBox="0 0 {w} {w}" shape-rendering="crispEdges">"#,
        w = size
    );
    for (r, &i) in order.iter().enumerate() {
        for (c, &j) in order.iter().enumerate() {
            let v = sim[(i, j)];
            let (red, green, blue) = if !v.is_finite() {
                (128, 128, 128)
            } else if v >= 0.0 {
                let t = v.min(1.0);
                (255, (255.0 * (1.0 - t)) as u8, (255.0 * (1.0 - t)) as u8)
            } else {
                let t = (-v).min(1.0);
                ((255.0 * (1.0 - t)) as u8, (255.0 * (1.0 - t)) as u8, 255)
            };
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{cell:.2}" height="{cell:.2}" fill="rgb({red},{green},{blue})"/>"#,
                c as f64 * cell,
                r as f64 * cell
            );
        }
    }
    let mut offset = 0;
    for (_, idx) in domains.iter().take(domains.len().saturating_sub(1)) {
        offset += idx.len();
        let p = offset as f64 * cell;
        let _ = writeln!(s, r#"<line x1="{p:.2}" y1="0" x2="{p:.2}" y2="{size:.2}" stroke="black" stroke-width="1"/>"#);
        let _ = writeln!(s, r#"<line x1="0" y1="{p:.2}" x2="{size:.2}" y2="{p:.2}" stroke="black" stroke-width="1"/>"#);
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangles_at_depth_zero() {
        let t = Graph::complete(3);
        assert_eq!(wl_kernel(&t, &t, 0), 9.0);
    }

    #[test]
    fn kernel_symmetry_and_isomorphism() {
        let g = Graph::petersen();
        let h = g.relabel(&[3, 1, 4, 0, 5, 9, 2, 6, 8, 7]).unwrap();
        let p = Graph::path(6);
        assert_eq!(wl_kernel(&g, &h, 3), wl_kernel(&g, &g, 3));
        assert_eq!(wl_kernel(&g, &p, 3), wl_kernel(&p, &g, 3));
    }

    #[test]
    fn kernel_matrix_cases() {
        let one = kernel_matrix(&[Graph::cycle(5)], 2).unwrap();
        assert!(one[(0, 0)] > 0.0);
        let dup = kernel_matrix(&[Graph::cycle(5), Graph::cycle(5)], 2).unwrap();
        assert!(dup.as_slice().iter().all(|&v| v == dup[(0, 0)]));
        let k = kernel_matrix(&[Graph::cycle(5), Graph::star(4), Graph::path(5)], 2).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!(k[(i, j)].powi(2) <= k[(i, i)] * k[(j, j)]);
            }
        }
    }

    #[test]
    fn embedding_reconstructs_kernel() {
        let id = Matrix::identity(4);
        let z = kernel_embedding(&id, 1.0).unwrap();
        assert!(z.matmul_t(&z).max_abs_diff(&id) < 1e-12);
        let v = [1.0, 2.0, -1.0];
        let r1 = Matrix::from_fn(3, 3, |i, j| v[i] * v[j]);
        assert_eq!(kernel_embedding(&r1, 1.0).unwrap().cols(), 1);
        let bad = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!(matches!(kernel_embedding(&bad, 1.0), Err(Error::Data(_))));
    }

    #[test]
    fn similarity_cases() {
        let z = Matrix::from_rows(&[vec![1.0, 0.0], vec![-1.0, 0.0], vec![1.0, 0.0]]);
        let s = similarity_matrix(&z, Centering::Columns).unwrap();
        assert!((s[(0, 2)] - 1.0).abs() < 1e-12);
        assert!((s[(0, 1)] + 1.0).abs() < 1e-12);
        let zero = Matrix::zeros(3, 2);
        assert!(similarity_matrix(&zero, Centering::Rows).is_err());
    }

    #[test]
    fn block_constant_fixture() {
        let dom = vec![("a".to_string(), vec![0, 1]), ("b".to_string(), vec![2, 3])];
        let sim = Matrix::from_fn(4, 4, |i, j| if i / 2 == j / 2 { 1.0 } else { 0.5 });
        let s = block_statistics(&sim, &dom).unwrap();
        assert_eq!(s.in_domain_mean, Some(1.0));
        assert_eq!(s.cross_domain_mean, Some(0.5));
        assert_eq!(s.separation_ratio, Some(0.5));
        let single = block_statistics(&sim, &[("a".to_string(), vec![0, 1, 2, 3])]).unwrap();
        assert_eq!(single.cross_domain_mean, None);
    }
}
