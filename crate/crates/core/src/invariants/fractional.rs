//! Fractional chromatic number.
//!
//! χ_f(G) = min Σ_S x_S over independent sets S subject to every vertex being
//! covered with weight at least 1. We solve the dual,
//! `max Σ_v y_v  s.t.  Σ_{v∈S} y_v ≤ 1  ∀ independent S`,
//! by generating constraints on demand: each round solves the LP over the
//! current pool of sets and prices a new set with a maximum-weight
//! independent set search under weights `y`. This is column generation on
//! the primal. The converged float value is snapped to the nearest rational
//! with a small denominator.

use crate::error::{Error, Result};
use crate::graph::Graph;

use super::cliques::{max_weight_independent_set, Bits};
use super::lp::maximize;

/// Default node limit for the fast path.
pub const DEFAULT_LIMIT: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct FractionalChromatic {
    pub value: f64,
    /// `(p, q)` with `value == p / q` when a small-denominator fraction fits.
    pub fraction: Option<(i64, i64)>,
    pub rounds: usize,
}

pub fn fractional_chromatic_number(g: &Graph, limit: usize) -> Result<FractionalChromatic> {
    let n = g.n();
    if n > limit || n > 64 {
        return Err(Error::Size {
            what: "fractional_chromatic_number".into(),
            n,
            limit: limit.min(64),
        });
    }
    let mut pool: Vec<Bits> = (0..n).map(|v| 1 << v).collect();
    pool.extend(greedy_colour_classes(g));
    pool.sort_unstable();
    pool.dedup();

    let ones = vec![1.0; n];
    for rounds in 1..=10_000 {
        let rows: Vec<Vec<f64>> = pool
            .iter()
            .map(|&s| (0..n).map(|v| if s >> v & 1 == 1 { 1.0 } else { 0.0 }).collect())
            .collect();
        let rhs = vec![1.0; pool.len()];
        let sol = maximize(&ones, &rows, &rhs)?;
        let y: Vec<f64> = sol.x.iter().map(|v| v.max(0.0)).collect();
        let (weight, set) = max_weight_independent_set(g, &y);
        if weight <= 1.0 + 1e-9 || pool.contains(&set) {
            let value = sol.objective;
            let fraction = snap_rational(value, 1e-7, 10_000);
            let value = fraction.map_or(value, |(p, q)| p as f64 / q as f64);
            return Ok(FractionalChromatic {
                value,
                fraction,
                rounds,
            });
        }
        pool.push(set);
    }
    Err(Error::Convergence {
        iterations: 10_000,
        best: f64::NAN,
        primal_residual: f64::NAN,
        gap: f64::NAN,
    })
}

fn greedy_colour_classes(g: &Graph) -> Vec<Bits> {
    let n = g.n();
    let mut colour = vec![usize::MAX; n];
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(g.degree(v)));
    let mut classes: Vec<Bits> = Vec::new();
    for v in order {
        let c = (0..)
            .find(|&c| g.neighbors(v).iter().all(|&w| colour[w] != c))
            .expect("some colour is free");
        colour[v] = c;
        if c == classes.len() {
            classes.push(0);
        }
        classes[c] |= 1 << v;
    }
    classes
}

/// Best continued-fraction convergent `p/q` within `tol` of `v` with `q <= max_den`.
pub fn snap_rational(v: f64, tol: f64, max_den: i64) -> Option<(i64, i64)> {
    if !v.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut x = v;
    for _ in 0..64 {
        let a = x.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            return None;
        }
        if (h2 as f64 / k2 as f64 - v).abs() <= tol {
            return Some((h2, k2));
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = x - a as f64;
        if frac.abs() < 1e-15 {
            return None;
        }
        x = 1.0 / frac;
    }
    None
}
