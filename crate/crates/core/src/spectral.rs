//! Symmetric eigendecomposition, graph Laplacians and the reversible
//! spectral positional encoding `B = U Λ^{1/2}` with `B Bᵀ = L`.
//!
//! [`eigh`] uses Householder tridiagonalization followed by implicit QL
//! iterations. [`eigh_jacobi`] is an independent cyclic Jacobi solver kept
//! as a cross-check.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{degree_matrix, Graph};
use crate::linalg::Matrix;

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
}

impl SpectralDecomposition {
    /// Largest `‖M u_k − λ_k u_k‖ / max(1, |λ_k|)` over all pairs.
    pub fn max_residual(&self, m: &Matrix) -> f64 {
        let n = m.rows();
        let mut worst: f64 = 0.0;
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let u = self.eigenvectors.column(k);
            let mut r2 = 0.0;
            for i in 0..n {
                let mu: f64 = m.row(i).iter().zip(&u).map(|(a, b)| a * b).sum();
                r2 += (mu - lam * u[i]).powi(2);
            }
            worst = worst.max(r2.sqrt() / lam.abs().max(1.0));
        }
        worst
    }

    /// `‖UᵀU − I‖_max`.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.eigenvectors.cols();
        self.eigenvectors
            .t_matmul(&self.eigenvectors)
            .max_abs_diff(&Matrix::identity(n))
    }

    /// `U diag(f(λ)) Uᵀ`.
    pub fn reassemble(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let u = &self.eigenvectors;
        let scaled = Matrix::from_fn(u.rows(), u.cols(), |i, k| u[(i, k)] * f(self.eigenvalues[k]));
        scaled.matmul_t(u).symmetrize()
    }
}

pub fn laplacian(a: &Matrix) -> Matrix {
    degree_matrix(a).sub(a)
}

fn check_symmetric(m: &Matrix) -> Result<()> {
    if m.rows() != m.cols() {
        return Err(Error::Argument(format!("matrix is {}x{}, not square", m.rows(), m.cols())));
    }
    let tol = 1e-12 * m.max_abs().max(1.0);
    if !m.is_symmetric(tol) {
        return Err(Error::Argument("matrix is not symmetric".into()));
    }
    if !m.is_finite() {
        return Err(Error::Numeric("eigh input".into()));
    }
    Ok(())
}

/// Full symmetric eigendecomposition, eigenvalues ascending, each
/// eigenvector signed so its largest-magnitude entry (lowest index on ties)
/// is positive.
pub fn eigh(m: &Matrix) -> Result<SpectralDecomposition> {
    check_symmetric(m)?;
    let n = m.rows();
    if n == 0 {
        return Ok(SpectralDecomposition {
            eigenvalues: Vec::new(),
            eigenvectors: Matrix::zeros(0, 0),
        });
    }
    let mut v = m.symmetrize();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut v, &mut d, &mut e);
    tridiagonal_ql(&mut v, &mut d, &mut e)?;
    Ok(finish(d, v))
}

fn finish(values: Vec<f64>, vectors: Matrix) -> SpectralDecomposition {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| values[k]).collect();
    let mut eigenvectors = Matrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    canonicalize_signs(&mut eigenvectors);
    SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

fn canonicalize_signs(u: &mut Matrix) {
    let n = u.rows();
    for k in 0..u.cols() {
        let max = (0..n).fold(0.0f64, |m, i| m.max(u[(i, k)].abs()));
        let pivot = (0..n).find(|&i| u[(i, k)].abs() >= max - 1e-10).unwrap_or(0);
        if u[(pivot, k)] < 0.0 {
            for i in 0..n {
                u[(i, k)] = -u[(i, k)];
            }
        }
    }
}

// Householder reduction to tridiagonal form (EISPACK tred2).
fn tridiagonalize(v: &mut Matrix, d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
                v[(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for item in e.iter_mut().take(i) {
                *item = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..n.saturating_sub(1) {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    v[(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = 0.0;
    }
    v[(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

// Implicit QL on the tridiagonal form (EISPACK tql2).
fn tridiagonal_ql(v: &mut Matrix, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 200 {
                    return Err(Error::Numeric("tridiagonal QL did not converge".into()));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for item in d.iter_mut().skip(l + 2) {
                    *item -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        h = v[(k, i + 1)];
                        v[(k, i + 1)] = s * v[(k, i)] + c * h;
                        v[(k, i)] = c * v[(k, i)] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Cyclic Jacobi eigensolver. Slower than [`eigh`] but structurally
/// independent of it.
pub fn eigh_jacobi(m: &Matrix) -> Result<SpectralDecomposition> {
    check_symmetric(m)?;
    let n = m.rows();
    let mut a = m.symmetrize();
    let mut v = Matrix::identity(n);
    let total = a.frobenius_norm().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off.sqrt() <= 1e-15 * total {
            let values = (0..n).map(|i| a[(i, i)]).collect();
            return Ok(finish(values, v));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    Err(Error::Numeric("Jacobi sweeps did not converge".into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EncodingMode {
    /// All `n` columns; `B Bᵀ = L` exactly.
    Full,
    /// The `d` columns of largest eigenvalue, zero-padded when `n < d`.
    Truncated(usize),
}

impl std::fmt::Display for EncodingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EncodingMode::Full => write!(f, "full"),
            EncodingMode::Truncated(d) => write!(f, "truncated:{d}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PositionalEncoding {
    pub b: Matrix,
    pub mode: EncodingMode,
    /// Eigenvalue behind each column of `b` (0 for padding columns).
    pub eigenvalues: Vec<f64>,
}

pub fn positional_encoding(g: &Graph, mode: EncodingMode) -> Result<PositionalEncoding> {
    let lap = laplacian(&g.adjacency());
    let dec = eigh(&lap)?;
    encode_from_decomposition(&dec, mode)
}

pub fn encode_from_decomposition(dec: &SpectralDecomposition, mode: EncodingMode) -> Result<PositionalEncoding> {
    let n = dec.eigenvalues.len();
    // Rounding-level eigenvalues are snapped to zero; their square roots
    // would otherwise put ~1e-8 noise on the null-space columns.
    let scale = dec.eigenvalues.iter().fold(1.0f64, |m, l| m.max(l.abs()));
    let floor = 16.0 * n as f64 * f64::EPSILON * scale;
    let sqrt_l: Vec<f64> = dec
        .eigenvalues
        .iter()
        .map(|&l| if l <= floor { 0.0 } else { l.sqrt() })
        .collect();
    let u = &dec.eigenvectors;
    match mode {
        EncodingMode::Full => Ok(PositionalEncoding {
            b: Matrix::from_fn(n, n, |i, k| u[(i, k)] * sqrt_l[k]),
            mode,
            eigenvalues: dec.eigenvalues.clone(),
        }),
        EncodingMode::Truncated(d) => {
            if d == 0 {
                return Err(Error::Argument("truncated encoding width must be >= 1".into()));
            }
            // Descending eigenvalue order.
            let cols: Vec<usize> = (0..n).rev().take(d).collect();
            let b = Matrix::from_fn(n, d, |i, c| cols.get(c).map_or(0.0, |&k| u[(i, k)] * sqrt_l[k]));
            let eigenvalues = (0..d).map(|c| cols.get(c).map_or(0.0, |&k| dec.eigenvalues[k])).collect();
            Ok(PositionalEncoding { b, mode, eigenvalues })
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Reconstruction {
    pub adjacency: Matrix,
    /// Largest distance of any pre-rounding off-diagonal entry from {0, 1}.
    pub max_deviation: f64,
}

/// Inverts a full-rank encoding: `L̂ = B Bᵀ`, `Â = diag(L̂) − L̂` rounded to {0, 1}.
pub fn reconstruct_adjacency(pe: &PositionalEncoding) -> Result<Reconstruction> {
    if pe.mode != EncodingMode::Full {
        return Err(Error::Mode(format!(
            "{} encodings are not invertible; use a full-rank encoding",
            pe.mode
        )));
    }
    let lhat = pe.b.matmul_t(&pe.b);
    let n = lhat.rows();
    let mut a = Matrix::zeros(n, n);
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let raw = -lhat[(i, j)];
            let rounded = raw.round().clamp(0.0, 1.0);
            dev = dev.max((raw - rounded).abs());
            a[(i, j)] = rounded;
        }
    }
    if dev > 1e-6 {
        return Err(Error::Data(format!(
            "reconstruction deviates from a 0/1 matrix by {dev:.3e}"
        )));
    }
    Ok(Reconstruction {
        adjacency: a,
        max_deviation: dev,
    })
}

/// Second-smallest Laplacian eigenvalue; `None` for single-node graphs.
pub fn fiedler_value(g: &Graph) -> Result<Option<f64>> {
    if g.n() < 2 {
        return Ok(None);
    }
    let dec = eigh(&laplacian(&g.adjacency()))?;
    Ok(Some(dec.eigenvalues[1]))
}

/// Writes `B` as text: a header line then one row per node.
pub fn write_encoding_text(id: &str, pe: &PositionalEncoding, mut out: impl Write) -> Result<()> {
    writeln!(out, "# id={} n={} r={} mode={}", id, pe.b.rows(), pe.b.cols(), pe.mode)?;
    for i in 0..pe.b.rows() {
        let row: Vec<String> = pe.b.row(i).iter().map(|v| format!("{v:e}")).collect();
        writeln!(out, "{}", row.join(" "))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn laplacian_examples() {
        let l = laplacian(&Graph::complete(2).adjacency());
        assert_eq!(l, Matrix::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]));
        assert_eq!(laplacian(&Graph::empty(3).adjacency()), Matrix::zeros(3, 3));
        let l = laplacian(&Graph::petersen().adjacency());
        for i in 0..10 {
            assert_eq!(l.row(i).iter().sum::<f64>(), 0.0);
        }
    }

    #[test]
    fn eigenvalues_of_known_matrices() {
        let k2 = eigh(&laplacian(&Graph::complete(2).adjacency())).unwrap();
        assert!(close(&k2.eigenvalues, &[0.0, 2.0], 1e-12));
        // cycle spectrum 2 - 2cos(2πk/n)
        let c4 = eigh(&laplacian(&Graph::cycle(4).adjacency())).unwrap();
        assert!(close(&c4.eigenvalues, &[0.0, 2.0, 2.0, 4.0], 1e-12));
        let id = eigh(&Matrix::identity(5)).unwrap();
        assert!(close(&id.eigenvalues, &[1.0; 5], 1e-14));
        assert!(eigh(&Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]])).is_err());
    }

    #[test]
    fn ql_and_jacobi_agree_with_small_residuals() {
        let g = Graph::petersen();
        let l = laplacian(&g.adjacency());
        let a = eigh(&l).unwrap();
        let b = eigh_jacobi(&l).unwrap();
        assert!(close(&a.eigenvalues, &b.eigenvalues, 1e-10));
        assert!(a.max_residual(&l) <= 1e-8);
        assert!(b.max_residual(&l) <= 1e-8);
        assert!(a.orthonormality_error() <= 1e-8);
        assert!(a.eigenvalues[0] >= -1e-10);
    }

    #[test]
    fn k2_encoding_is_plus_minus_one() {
        let pe = positional_encoding(&Graph::complete(2), EncodingMode::Full).unwrap();
        assert!(pe.b[(0, 0)].abs() < 1e-12 && pe.b[(1, 0)].abs() < 1e-12);
        assert!((pe.b[(0, 1)] - 1.0).abs() < 1e-12);
        assert!((pe.b[(1, 1)] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_graph_encodes_to_zero() {
        let pe = positional_encoding(&Graph::empty(4), EncodingMode::Full).unwrap();
        assert_eq!(pe.b.max_abs(), 0.0);
        let r = reconstruct_adjacency(&pe).unwrap();
        assert_eq!(r.adjacency, Matrix::zeros(4, 4));
    }

    #[test]
    fn truncated_encoding_pads_and_refuses_inversion() {
        let pe = positional_encoding(&Graph::path(3), EncodingMode::Truncated(5)).unwrap();
        assert_eq!(pe.b.shape(), (3, 5));
        assert_eq!(pe.b.column(4), vec![0.0; 3]);
        assert!(pe.eigenvalues[0] >= pe.eigenvalues[1]);
        assert!(matches!(reconstruct_adjacency(&pe), Err(Error::Mode(_))));
        assert!(positional_encoding(&Graph::path(3), EncodingMode::Truncated(0)).is_err());
    }

    #[test]
    fn fiedler_values() {
        assert!((fiedler_value(&Graph::complete(5)).unwrap().unwrap() - 5.0).abs() < 1e-10);
        assert!((fiedler_value(&Graph::path(2)).unwrap().unwrap() - 2.0).abs() < 1e-12);
        let two = Graph::complete(3).disjoint_union(&Graph::complete(3));
        assert!(fiedler_value(&two).unwrap().unwrap().abs() < 1e-8);
        assert_eq!(fiedler_value(&Graph::empty(1)).unwrap(), None);
    }
}
