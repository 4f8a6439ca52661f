//! Forward pass with cached activations and hand-written backpropagation.

use crate::error::{Error, Result};
use crate::linalg::Matrix;

use super::loss::{loss_with_gradient, LossParts, LossWeights, Prediction, Targets};
use super::params::{ArchConfig, LayerParams, Params, Readout};

const LN_EPS: f64 = 1e-5;
const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;
const GELU_CUBIC: f64 = 0.044_715;

/// Tanh approximation of GELU.
fn gelu(x: f64) -> f64 {
    0.5 * x * (1.0 + (SQRT_2_OVER_PI * (x + GELU_CUBIC * x * x * x)).tanh())
}

fn gelu_grad(x: f64) -> f64 {
    let t = (SQRT_2_OVER_PI * (x + GELU_CUBIC * x * x * x)).tanh();
    0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * SQRT_2_OVER_PI * (1.0 + 3.0 * GELU_CUBIC * x * x)
}

fn map(m: &Matrix, f: impl Fn(f64) -> f64) -> Matrix {
    Matrix::from_vec(m.rows(), m.cols(), m.as_slice().iter().map(|&v| f(v)).collect())
}

fn hadamard(a: &Matrix, b: &Matrix) -> Matrix {
    Matrix::from_vec(a.rows(), a.cols(), a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x * y).collect())
}

/// `x W + 1 bᵀ`.
fn affine(x: &Matrix, w: &Matrix, b: &Matrix) -> Matrix {
    let mut y = x.matmul(w);
    for i in 0..y.rows() {
        for (v, bias) in y.row_mut(i).iter_mut().zip(b.row(0)) {
            *v += bias;
        }
    }
    y
}

fn col_sums(m: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(1, m.cols());
    for i in 0..m.rows() {
        for (o, v) in out.row_mut(0).iter_mut().zip(m.row(i)) {
            *o += v;
        }
    }
    out
}

struct LnCache {
    xhat: Matrix,
    inv_std: Vec<f64>,
}

fn layer_norm(x: &Matrix, gain: &Matrix, bias: &Matrix) -> (Matrix, LnCache) {
    let (n, d) = x.shape();
    let mut xhat = Matrix::zeros(n, d);
    let mut y = Matrix::zeros(n, d);
    let mut inv_std = vec![0.0; n];
    for i in 0..n {
        let row = x.row(i);
        let mean = row.iter().sum::<f64>() / d as f64;
        let var = row.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / d as f64;
        let is = 1.0 / (var + LN_EPS).sqrt();
        inv_std[i] = is;
        for j in 0..d {
            let h = (row[j] - mean) * is;
            xhat[(i, j)] = h;
            y[(i, j)] = gain[(0, j)] * h + bias[(0, j)];
        }
    }
    (y, LnCache { xhat, inv_std })
}

/// Returns `(dx, dgain, dbias)`.
fn layer_norm_backward(dy: &Matrix, cache: &LnCache, gain: &Matrix) -> (Matrix, Matrix, Matrix) {
    let (n, d) = dy.shape();
    let mut dx = Matrix::zeros(n, d);
    let mut dgain = Matrix::zeros(1, d);
    let mut dbias = Matrix::zeros(1, d);
    let mut dxhat = vec![0.0; d];
    for i in 0..n {
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for j in 0..d {
            let g = dy[(i, j)];
            dgain[(0, j)] += g * cache.xhat[(i, j)];
            dbias[(0, j)] += g;
            dxhat[j] = g * gain[(0, j)];
            s1 += dxhat[j];
            s2 += dxhat[j] * cache.xhat[(i, j)];
        }
        let k = cache.inv_std[i] / d as f64;
        for j in 0..d {
            dx[(i, j)] = k * (d as f64 * dxhat[j] - s1 - cache.xhat[(i, j)] * s2);
        }
    }
    (dx, dgain, dbias)
}

/// Multi-head scaled dot-product attention; returns the concatenated head
/// outputs and each head's row-stochastic weight matrix.
fn attention(q: &Matrix, k: &Matrix, v: &Matrix, heads: usize) -> (Matrix, Vec<Matrix>) {
    let (n, d) = q.shape();
    let dh = d / heads;
    let scale = 1.0 / (dh as f64).sqrt();
    let mut out = Matrix::zeros(n, d);
    let mut probs = Vec::with_capacity(heads);
    for h in 0..heads {
        let cols = h * dh..(h + 1) * dh;
        let mut p = Matrix::from_fn(n, n, |i, j| {
            scale * q.row(i)[cols.clone()].iter().zip(&k.row(j)[cols.clone()]).map(|(a, b)| a * b).sum::<f64>()
        });
        for i in 0..n {
            let row = p.row_mut(i);
            let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mut sum = 0.0;
            for x in row.iter_mut() {
                *x = (*x - max).exp();
                sum += *x;
            }
            for x in row.iter_mut() {
                *x /= sum;
            }
        }
        for i in 0..n {
            for j in 0..n {
                let w = p[(i, j)];
                for c in cols.clone() {
                    out[(i, c)] += w * v[(j, c)];
                }
            }
        }
        probs.push(p);
    }
    (out, probs)
}

/// Returns `(dq, dk, dv)`.
fn attention_backward(dout: &Matrix, q: &Matrix, k: &Matrix, v: &Matrix, probs: &[Matrix]) -> (Matrix, Matrix, Matrix) {
    let (n, d) = q.shape();
    let heads = probs.len();
    let dh = d / heads;
    let scale = 1.0 / (dh as f64).sqrt();
    let mut dq = Matrix::zeros(n, d);
    let mut dk = Matrix::zeros(n, d);
    let mut dv = Matrix::zeros(n, d);
    for (h, p) in probs.iter().enumerate() {
        let cols = h * dh..(h + 1) * dh;
        // dP = dO Vᵀ, dV = Pᵀ dO.
        let dp = Matrix::from_fn(n, n, |i, j| cols.clone().map(|c| dout[(i, c)] * v[(j, c)]).sum());
        for i in 0..n {
            for j in 0..n {
                let w = p[(i, j)];
                for c in cols.clone() {
                    dv[(j, c)] += w * dout[(i, c)];
                }
            }
        }
        // Softmax backward, then the scaled score product.
        for i in 0..n {
            let dot: f64 = (0..n).map(|j| dp[(i, j)] * p[(i, j)]).sum();
            for j in 0..n {
                let ds = p[(i, j)] * (dp[(i, j)] - dot) * scale;
                if ds == 0.0 {
                    continue;
                }
                for c in cols.clone() {
                    dq[(i, c)] += ds * k[(j, c)];
                    dk[(j, c)] += ds * q[(i, c)];
                }
            }
        }
    }
    (dq, dk, dv)
}

struct LayerCache {
    x: Matrix,
    q: Matrix,
    k: Matrix,
    v: Matrix,
    probs: Vec<Matrix>,
    attn: Matrix,
    ln1: LnCache,
    h1: Matrix,
    ff_pre: Matrix,
    ff_act: Matrix,
    ln2: LnCache,
}

fn layer_forward(p: &LayerParams, x: &Matrix, heads: usize) -> (Matrix, LayerCache) {
    let q = affine(x, &p.wq, &p.bq);
    let k = affine(x, &p.wk, &p.bk);
    let v = affine(x, &p.wv, &p.bv);
    let (attn, probs) = attention(&q, &k, &v, heads);
    let a = affine(&attn, &p.wo, &p.bo);
    let (h1, ln1) = layer_norm(&x.add(&a), &p.ln1_gain, &p.ln1_bias);
    let ff_pre = affine(&h1, &p.ff_w1, &p.ff_b1);
    let ff_act = map(&ff_pre, gelu);
    let f = affine(&ff_act, &p.ff_w2, &p.ff_b2);
    let (out, ln2) = layer_norm(&h1.add(&f), &p.ln2_gain, &p.ln2_bias);
    let cache = LayerCache {
        x: x.clone(),
        q,
        k,
        v,
        probs,
        attn,
        ln1,
        h1,
        ff_pre,
        ff_act,
        ln2,
    };
    (out, cache)
}

/// Accumulates parameter gradients into `g` and returns the input gradient.
fn layer_backward(p: &LayerParams, c: &LayerCache, dout: &Matrix, g: &mut LayerParams) -> Matrix {
    let (dr2, dg2, db2) = layer_norm_backward(dout, &c.ln2, &p.ln2_gain);
    g.ln2_gain.add_assign_scaled(&dg2, 1.0);
    g.ln2_bias.add_assign_scaled(&db2, 1.0);
    g.ff_w2.add_assign_scaled(&c.ff_act.t_matmul(&dr2), 1.0);
    g.ff_b2.add_assign_scaled(&col_sums(&dr2), 1.0);
    let dpre = hadamard(&dr2.matmul_t(&p.ff_w2), &map(&c.ff_pre, gelu_grad));
    g.ff_w1.add_assign_scaled(&c.h1.t_matmul(&dpre), 1.0);
    g.ff_b1.add_assign_scaled(&col_sums(&dpre), 1.0);
    let dh1 = dr2.add(&dpre.matmul_t(&p.ff_w1));

    let (dr1, dg1, db1) = layer_norm_backward(&dh1, &c.ln1, &p.ln1_gain);
    g.ln1_gain.add_assign_scaled(&dg1, 1.0);
    g.ln1_bias.add_assign_scaled(&db1, 1.0);
    g.wo.add_assign_scaled(&c.attn.t_matmul(&dr1), 1.0);
    g.bo.add_assign_scaled(&col_sums(&dr1), 1.0);
    let dattn = dr1.matmul_t(&p.wo);
    let (dq, dk, dv) = attention_backward(&dattn, &c.q, &c.k, &c.v, &c.probs);

    let mut dx = dr1;
    for (dproj, w, gw, gb) in [
        (&dq, &p.wq, &mut g.wq, &mut g.bq),
        (&dk, &p.wk, &mut g.wk, &mut g.bk),
        (&dv, &p.wv, &mut g.wv, &mut g.bv),
    ] {
        gw.add_assign_scaled(&c.x.t_matmul(dproj), 1.0);
        gb.add_assign_scaled(&col_sums(dproj), 1.0);
        dx.add_assign_scaled(&dproj.matmul_t(w), 1.0);
    }
    dx
}

/// Activations of one encoder pass, kept for backpropagation.
pub struct EncoderTrace {
    input: Matrix,
    layers: Vec<LayerCache>,
    /// Structural representation `Z`, one row per node.
    pub z: Matrix,
}

/// `Z = f(B; Θ)`. Requires `B` to have exactly `d_in` columns.
pub fn encode(params: &Params, arch: &ArchConfig, b: &Matrix) -> Result<EncoderTrace> {
    if b.cols() != arch.d_in {
        return Err(Error::Shape(format!(
            "positional encoding has {} columns, encoder expects {}",
            b.cols(),
            arch.d_in
        )));
    }
    let mut h = affine(b, &params.input_w, &params.input_b);
    let mut layers = Vec::with_capacity(params.layers.len());
    for lp in &params.layers {
        let (out, cache) = layer_forward(lp, &h, arch.heads);
        layers.push(cache);
        h = out;
    }
    Ok(EncoderTrace {
        input: b.clone(),
        layers,
        z: h,
    })
}

/// Activations of the heads, kept for backpropagation.
pub struct HeadTrace {
    pooled: Matrix,
    graph_pre: Matrix,
    graph_act: Matrix,
    node_pre: Matrix,
    node_act: Matrix,
    pair_sym: Vec<Matrix>,
}

/// Mean of the rows of `z`, with `ln n` appended for the sized readout.
pub fn pool(z: &Matrix, readout: Readout) -> Matrix {
    let n = z.rows();
    let mut pooled = col_sums(z).scale(1.0 / n as f64);
    if readout == Readout::MeanAndSize {
        let mut v = pooled.into_vec();
        v.push((n as f64).ln());
        pooled = Matrix::from_vec(1, v.len(), v);
    }
    pooled
}

/// `(p̂, q̂, Q̂)` from `Z`.
pub fn predict(params: &Params, arch: &ArchConfig, z: &Matrix) -> (Prediction, HeadTrace) {
    let pooled = pool(z, arch.readout);
    let graph_pre = affine(&pooled, &params.graph_w1, &params.graph_b1);
    let graph_act = map(&graph_pre, gelu);
    let graph = affine(&graph_act, &params.graph_w2, &params.graph_b2).into_vec();

    let node_pre = affine(z, &params.node_w1, &params.node_b1);
    let node_act = map(&node_pre, gelu);
    let node = affine(&node_act, &params.node_w2, &params.node_b2);

    let pair_sym: Vec<Matrix> = params.pair_w.iter().map(|w| w.symmetrize()).collect();
    let pair = pair_sym
        .iter()
        .enumerate()
        .map(|(r, s)| {
            let c = params.pair_b[(0, r)];
            let q = z.matmul(s).matmul_t(z);
            map(&q.symmetrize(), |v| v + c)
        })
        .collect();

    (
        Prediction { graph, node, pair },
        HeadTrace {
            pooled,
            graph_pre,
            graph_act,
            node_pre,
            node_act,
            pair_sym,
        },
    )
}

fn heads_backward(params: &Params, arch: &ArchConfig, z: &Matrix, t: &HeadTrace, dp: &Prediction, g: &mut Params) -> Matrix {
    let (n, d) = z.shape();
    let mut dz = Matrix::zeros(n, d);

    let dgraph = Matrix::from_vec(1, dp.graph.len(), dp.graph.clone());
    g.graph_w2.add_assign_scaled(&t.graph_act.t_matmul(&dgraph), 1.0);
    g.graph_b2.add_assign_scaled(&dgraph, 1.0);
    let dpre = hadamard(&dgraph.matmul_t(&params.graph_w2), &map(&t.graph_pre, gelu_grad));
    g.graph_w1.add_assign_scaled(&t.pooled.t_matmul(&dpre), 1.0);
    g.graph_b1.add_assign_scaled(&dpre, 1.0);
    let dpooled = dpre.matmul_t(&params.graph_w1);
    for i in 0..n {
        for j in 0..d {
            dz[(i, j)] += dpooled[(0, j)] / n as f64;
        }
    }
    debug_assert_eq!(dpooled.cols(), arch.pooled_width());

    g.node_w2.add_assign_scaled(&t.node_act.t_matmul(&dp.node), 1.0);
    g.node_b2.add_assign_scaled(&col_sums(&dp.node), 1.0);
    let dnpre = hadamard(&dp.node.matmul_t(&params.node_w2), &map(&t.node_pre, gelu_grad));
    g.node_w1.add_assign_scaled(&z.t_matmul(&dnpre), 1.0);
    g.node_b1.add_assign_scaled(&col_sums(&dnpre), 1.0);
    dz.add_assign_scaled(&dnpre.matmul_t(&params.node_w1), 1.0);

    for (r, dq) in dp.pair.iter().enumerate() {
        // The output is symmetrized, so only the symmetric part of dQ acts.
        let dqs = dq.symmetrize();
        g.pair_b[(0, r)] += dqs.as_slice().iter().sum::<f64>();
        let m = z.t_matmul(&dqs).matmul(z);
        g.pair_w[r].add_assign_scaled(&m.symmetrize(), 1.0);
        dz.add_assign_scaled(&dqs.matmul(z).matmul(&t.pair_sym[r]), 2.0);
    }
    dz
}

/// Predictions for one positional encoding.
pub fn forward(params: &Params, arch: &ArchConfig, b: &Matrix) -> Result<Prediction> {
    let trace = encode(params, arch, b)?;
    Ok(predict(params, arch, &trace.z).0)
}

/// Loss of one graph without gradients.
pub fn loss(params: &Params, arch: &ArchConfig, b: &Matrix, t: &Targets, w: &LossWeights) -> Result<LossParts> {
    let pred = forward(params, arch, b)?;
    Ok(loss_with_gradient(&pred, t, w).0)
}

/// Loss of one graph and the gradient for every parameter tensor.
pub fn loss_and_gradient(
    params: &Params,
    arch: &ArchConfig,
    b: &Matrix,
    t: &Targets,
    w: &LossWeights,
) -> Result<(LossParts, Params)> {
    let trace = encode(params, arch, b)?;
    let (pred, heads) = predict(params, arch, &trace.z);
    let (parts, dpred) = loss_with_gradient(&pred, t, w);
    let mut g = Params::zeros(arch);
    let mut dh = heads_backward(params, arch, &trace.z, &heads, &dpred, &mut g);
    for (l, cache) in trace.layers.iter().enumerate().rev() {
        dh = layer_backward(&params.layers[l], cache, &dh, &mut g.layers[l]);
    }
    g.input_w.add_assign_scaled(&trace.input.t_matmul(&dh), 1.0);
    g.input_b.add_assign_scaled(&col_sums(&dh), 1.0);
    if let Some(name) = g.first_non_finite() {
        return Err(Error::Numeric(format!("non-finite gradient in `{name}`")));
    }
    Ok((parts, g))
}

/// Result of comparing analytic and central-difference gradients.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientCheck {
    /// Largest `|a − f| / max(|a|, |f|, floor)` over all entries.
    pub max_relative_error: f64,
    /// Tensor and flat index of the worst entry.
    pub worst: (String, usize),
    pub entries: usize,
}

/// Checks every parameter entry with step `eps`. Entries where both
/// gradients are below `floor` in magnitude are compared absolutely
/// against `floor`.
pub fn gradient_check(
    params: &Params,
    arch: &ArchConfig,
    b: &Matrix,
    t: &Targets,
    w: &LossWeights,
    eps: f64,
    floor: f64,
) -> Result<GradientCheck> {
    let (_, analytic) = loss_and_gradient(params, arch, b, t, w)?;
    let mut probe = params.clone();
    let mut report = GradientCheck {
        max_relative_error: 0.0,
        worst: (String::new(), 0),
        entries: 0,
    };
    let names: Vec<String> = params.named().into_iter().map(|(n, _)| n).collect();
    let analytic_named = analytic.named();
    for (ti, name) in names.iter().enumerate() {
        let len = analytic_named[ti].1.as_slice().len();
        for idx in 0..len {
            let orig = params.named()[ti].1.as_slice()[idx];
            probe.named_mut()[ti].1.as_mut_slice()[idx] = orig + eps;
            let up = loss(&probe, arch, b, t, w)?.total();
            probe.named_mut()[ti].1.as_mut_slice()[idx] = orig - eps;
            let down = loss(&probe, arch, b, t, w)?.total();
            probe.named_mut()[ti].1.as_mut_slice()[idx] = orig;
            let numeric = (up - down) / (2.0 * eps);
            let a = analytic_named[ti].1.as_slice()[idx];
            let err = (a - numeric).abs() / a.abs().max(numeric.abs()).max(floor);
            report.entries += 1;
            if err > report.max_relative_error {
                report.max_relative_error = err;
                report.worst = (name.clone(), idx);
            }
        }
    }
    Ok(report)
}
