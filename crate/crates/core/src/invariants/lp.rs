//! Dense dictionary simplex for `max cᵀx  s.t.  Ax ≤ b, x ≥ 0` with `b ≥ 0`,
//! generic over the scalar so the same routine runs in floating point and in
//! exact rational arithmetic. Bland's rule prevents cycling.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub trait LpScalar:
    Clone
    + Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + PartialOrd
{
    /// Strictly positive beyond the pivot tolerance.
    fn is_pos(&self) -> bool;
    fn to_f64(&self) -> f64;
}

/// Pivot tolerance for floating-point solves.
pub const FLOAT_PIVOT_TOL: f64 = 1e-9;

impl LpScalar for f64 {
    fn is_pos(&self) -> bool {
        *self > FLOAT_PIVOT_TOL
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl LpScalar for BigRational {
    fn is_pos(&self) -> bool {
        self.is_positive()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Clone, Debug)]
pub struct LpSolution<T> {
    pub objective: T,
    pub x: Vec<T>,
    pub pivots: usize,
}

/// Solves `max cᵀx` subject to `rows[i]·x ≤ rhs[i]`, `x ≥ 0`. Every `rhs[i]`
/// must be non-negative so the origin is a feasible start.
pub fn maximize<T: LpScalar>(c: &[T], rows: &[Vec<T>], rhs: &[T]) -> Result<LpSolution<T>> {
    let n = c.len();
    let m = rows.len();
    if rhs.len() != m || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Shape("LP rows, rhs and objective disagree".into()));
    }
    if rhs.iter().any(|b| *b < T::zero()) {
        return Err(Error::Argument("LP right-hand side must be non-negative".into()));
    }
    let mut t: Vec<Vec<T>> = rows.to_vec();
    let mut beta: Vec<T> = rhs.to_vec();
    let mut d: Vec<T> = c.to_vec();
    let mut z0 = T::zero();
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut nonbasis: Vec<usize> = (0..n).collect();
    let mut pivots = 0;

    loop {
        let entering = (0..n)
            .filter(|&j| d[j].is_pos())
            .min_by_key(|&j| nonbasis[j]);
        let Some(s) = entering else { break };

        let mut leave: Option<(usize, T)> = None;
        for i in 0..m {
            if !t[i][s].is_pos() {
                continue;
            }
            let ratio = beta[i].clone() / t[i][s].clone();
            let better = match &leave {
                None => true,
                Some((r, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*r]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let Some((r, _)) = leave else {
            return Err(Error::Data("LP is unbounded".into()));
        };

        let piv = t[r][s].clone();
        let inv = T::one() / piv;
        beta[r] = beta[r].clone() * inv.clone();
        for j in 0..n {
            if j != s {
                t[r][j] = t[r][j].clone() * inv.clone();
            }
        }
        t[r][s] = inv.clone();
        let (pivot_row, beta_r) = (t[r].clone(), beta[r].clone());
        for i in 0..m {
            if i == r || t[i][s].is_zero() {
                continue;
            }
            let coef = t[i][s].clone();
            beta[i] = beta[i].clone() - coef.clone() * beta_r.clone();
            for j in 0..n {
                if j != s {
                    t[i][j] = t[i][j].clone() - coef.clone() * pivot_row[j].clone();
                }
            }
            t[i][s] = -(coef * inv.clone());
        }
        let coef = d[s].clone();
        z0 = z0 + coef.clone() * beta_r;
        for j in 0..n {
            if j != s {
                d[j] = d[j].clone() - coef.clone() * pivot_row[j].clone();
            }
        }
        d[s] = -(coef * inv);
        std::mem::swap(&mut basis[r], &mut nonbasis[s]);
        pivots += 1;
        if pivots > 100_000 {
            return Err(Error::Convergence {
                iterations: pivots,
                best: z0.to_f64(),
                primal_residual: f64::NAN,
                gap: f64::NAN,
            });
        }
    }

    let mut x = vec![T::zero(); n];
    for (i, &b) in basis.iter().enumerate() {
        if b < n {
            x[b] = beta[i].clone();
        }
    }
    Ok(LpSolution {
        objective: z0,
        x,
        pivots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_problem() {
        // max 5x + 4y + 3z, 2x+3y+z<=5, 4x+y+2z<=11, 3x+4y+2z<=8 -> 13
        let c = [5.0, 4.0, 3.0];
        let a = vec![vec![2.0, 3.0, 1.0], vec![4.0, 1.0, 2.0], vec![3.0, 4.0, 2.0]];
        let sol = maximize(&c, &a, &[5.0, 11.0, 8.0]).unwrap();
        assert!((sol.objective - 13.0).abs() < 1e-12);
        assert!((sol.x[0] - 2.0).abs() < 1e-12 && (sol.x[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_arithmetic() {
        let r = |n| rational(n, 1);
        let c = vec![r(1), r(1)];
        let a = vec![vec![r(2), r(1)], vec![r(1), r(2)]];
        let sol = maximize(&c, &a, &[r(1), r(1)]).unwrap();
        assert_eq!(sol.objective, rational(2, 3));
    }

    #[test]
    fn unbounded_is_reported() {
        assert!(maximize(&[1.0], &[vec![-1.0]], &[1.0]).is_err());
    }
}
