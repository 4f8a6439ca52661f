//! Primal-dual interior-point solver (HKM search direction) for the Lovász
//! SDP. Dense and second-order, so it serves as a reference for the
//! first-order solver on small graphs.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::Matrix;
use crate::spectral::eigh;

/// Node limit for the dense interior-point path.
pub const LIMIT: usize = 30;

/// Constraint 0 is `tr X = 1`; constraint `k ≥ 1` is `X_ij + X_ji = 0` for
/// the `k`-th edge.
struct Constraints<'a> {
    n: usize,
    edges: &'a [(usize, usize)],
}

impl Constraints<'_> {
    fn m(&self) -> usize {
        self.edges.len() + 1
    }

    fn apply(&self, x: &Matrix) -> Vec<f64> {
        let mut out = vec![x.trace()];
        out.extend(self.edges.iter().map(|&(i, j)| x[(i, j)] + x[(j, i)]));
        out
    }

    fn adjoint(&self, y: &[f64]) -> Matrix {
        let mut m = Matrix::zeros(self.n, self.n);
        for i in 0..self.n {
            m[(i, i)] = y[0];
        }
        for (k, &(i, j)) in self.edges.iter().enumerate() {
            m[(i, j)] += y[k + 1];
            m[(j, i)] += y[k + 1];
        }
        m
    }

    /// `X A_k W` for constraint `k`.
    fn sandwich(&self, k: usize, x: &Matrix, w: &Matrix) -> Matrix {
        if k == 0 {
            return x.matmul(w);
        }
        let (a, b) = self.edges[k - 1];
        Matrix::from_fn(self.n, self.n, |r, c| x[(r, a)] * w[(b, c)] + x[(r, b)] * w[(a, c)])
    }
}

/// Largest step in (0, 1] keeping `x + α d` positive definite, damped by 0.95.
fn max_step(x: &Matrix, d: &Matrix) -> Result<f64> {
    let l = x
        .cholesky()
        .ok_or_else(|| Error::Numeric("interior-point iterate left the PSD cone".into()))?;
    let li = l.lower_triangular_inverse();
    let t = li.matmul(d).matmul_t(&li).symmetrize();
    let lmin = eigh(&t)?.eigenvalues[0];
    Ok(if lmin >= 0.0 { 1.0 } else { (0.95 / -lmin).min(1.0) })
}

/// θ(G) to roughly 1e-9 relative accuracy.
pub fn lovasz_number_ipm(g: &Graph) -> Result<f64> {
    let n = g.n();
    if n > LIMIT {
        return Err(Error::Size {
            what: "lovasz_number (interior point)".into(),
            n,
            limit: LIMIT,
        });
    }
    if g.edge_count() == 0 {
        return Ok(n as f64);
    }
    let cons = Constraints { n, edges: g.edges() };
    let m = cons.m();
    let mut b = vec![0.0; m];
    b[0] = 1.0;
    let c = Matrix::from_fn(n, n, |_, _| -1.0);

    let mut x = Matrix::identity(n).scale(1.0 / n as f64);
    let mut y = vec![0.0; m];
    y[0] = -(n as f64 + 1.0);
    let mut z = c.sub(&cons.adjoint(&y));
    let sigma = 0.1;
    // Near the optimum X may become numerically singular. A breakdown once
    // the gap is closed and the dual is feasible still yields the value to
    // about the size of the primal residual.
    let settled = |gap: f64, rp: f64, rd: f64| gap <= 1e-8 && rp <= 1e-6 && rd <= 1e-8;

    for _ in 0..200 {
        let ax = cons.apply(&x);
        let rp: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let rd = c.sub(&z).sub(&cons.adjoint(&y));
        let mu = x.frobenius_dot(&z) / n as f64;
        let pobj = c.frobenius_dot(&x);
        let dobj: f64 = b.iter().zip(&y).map(|(p, q)| p * q).sum();
        let rp_norm = rp.iter().map(|v| v * v).sum::<f64>().sqrt();
        let value = -0.5 * (pobj + dobj);
        let gap = mu * n as f64 / (1.0 + pobj.abs());
        let rd_norm = rd.max_abs();
        if gap <= 1e-11 && rp_norm <= 1e-10 && rd_norm <= 1e-10 {
            return Ok(value);
        }
        let r = Residuals {
            rp: &rp,
            rd: &rd,
            mu,
            sigma,
        };
        match step(&cons, &mut x, &mut y, &mut z, r) {
            Ok(()) => {}
            Err(_) if settled(gap, rp_norm, rd_norm) => return Ok(value),
            Err(e) => return Err(e),
        }
    }
    Err(Error::Convergence {
        iterations: 200,
        best: -c.frobenius_dot(&x),
        primal_residual: f64::NAN,
        gap: f64::NAN,
    })
}

struct Residuals<'a> {
    rp: &'a [f64],
    rd: &'a Matrix,
    mu: f64,
    sigma: f64,
}

/// One HKM step. Iterates are only updated once every factorization has
/// succeeded.
fn step(cons: &Constraints, x: &mut Matrix, y: &mut [f64], z: &mut Matrix, r: Residuals) -> Result<()> {
    let m = cons.m();
    let ax = cons.apply(x);
    let lz = z
        .cholesky()
        .ok_or_else(|| Error::Numeric("dual slack lost definiteness".into()))?;
    let lzi = lz.lower_triangular_inverse();
    let w = lzi.t_matmul(&lzi);

    let mut schur = Matrix::zeros(m, m);
    for k in 0..m {
        let col = cons.apply(&cons.sandwich(k, x, &w));
        for (i, v) in col.into_iter().enumerate() {
            schur[(i, k)] = v;
        }
    }
    let schur = schur.symmetrize();
    let aw = cons.apply(&w);
    let axrw = cons.apply(&x.matmul(r.rd).matmul(&w));
    let rhs: Vec<f64> = (0..m)
        .map(|i| r.rp[i] - r.sigma * r.mu * aw[i] + ax[i] + axrw[i])
        .collect();
    let dy = schur
        .cholesky_solve(&rhs)
        .or_else(|| schur.lu_solve(&rhs))
        .ok_or_else(|| Error::Numeric("singular Schur complement".into()))?;
    let dz = r.rd.sub(&cons.adjoint(&dy));
    let dx = w
        .scale(r.sigma * r.mu)
        .sub(x)
        .sub(&x.matmul(&dz).matmul(&w))
        .symmetrize();

    let ap = max_step(x, &dx)?;
    let ad = max_step(z, &dz)?;
    x.add_assign_scaled(&dx, ap);
    z.add_assign_scaled(&dz, ad);
    for (yi, d) in y.iter_mut().zip(&dy) {
        *yi += ad * d;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        assert!((lovasz_number_ipm(&Graph::cycle(5)).unwrap() - 5f64.sqrt()).abs() < 1e-8);
        assert!((lovasz_number_ipm(&Graph::complete(5)).unwrap() - 1.0).abs() < 1e-8);
        assert!((lovasz_number_ipm(&Graph::petersen()).unwrap() - 4.0).abs() < 1e-8);
        assert_eq!(lovasz_number_ipm(&Graph::empty(3)).unwrap(), 3.0);
        let t = std::f64::consts::PI / 7.0;
        let c7 = 7.0 * t.cos() / (1.0 + t.cos());
        assert!((lovasz_number_ipm(&Graph::cycle(7)).unwrap() - c7).abs() < 1e-8);
    }
}
