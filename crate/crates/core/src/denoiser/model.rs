//! Forward pass with an activation trace, and its exact reverse pass.

use super::features::{ComplexInput, Features, N_BOND_TYPES, N_FEATURES};
use super::params::{BlockOffsets, Layout, ModelWeights};
use crate::geom::Vec3;
use crate::molio::{Molecule, Pocket, Pose, Provenance, Receptor};
use crate::{Error, Result};

/// Edge cutoff in Å for both ligand–ligand and ligand–pocket edges.
pub const CUTOFF: f64 = 10.0;
/// Squared distances enter the edge networks divided by this (Å²).
pub const DIST2_SCALE: f64 = 100.0;
/// Normalizer for sums over ligand neighbours.
pub const LIGAND_NORM: f64 = 8.0;
/// Normalizer for coordinate updates from pocket neighbours.
pub const POCKET_NORM: f64 = 32.0;

#[inline]
fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

#[inline]
fn silu(x: f64) -> f64 {
    x * sigmoid(x)
}

#[inline]
fn dsilu(x: f64) -> f64 {
    let s = sigmoid(x);
    s * (1.0 + x * (1.0 - s))
}

/// Cosine switch `0.5·(cos(πd/rc) + 1)` and its derivative; zero at and
/// beyond the cutoff, with a continuous first derivative.
#[inline]
fn switch(d: f64) -> (f64, f64) {
    let k = std::f64::consts::PI / CUTOFF;
    (0.5 * ((k * d).cos() + 1.0), -0.5 * k * (k * d).sin())
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// y += W x for row-major W (rows × cols).
fn matvec_acc(w: &[f64], cols: usize, x: &[f64], y: &mut [f64]) {
    for (r, yr) in y.iter_mut().enumerate() {
        *yr += dot(&w[r * cols..(r + 1) * cols], x);
    }
}

/// x += Wᵀ g.
fn matvec_t_acc(w: &[f64], cols: usize, g: &[f64], x: &mut [f64]) {
    for (r, &gr) in g.iter().enumerate() {
        if gr == 0.0 {
            continue;
        }
        for (xc, wc) in x.iter_mut().zip(&w[r * cols..(r + 1) * cols]) {
            *xc += wc * gr;
        }
    }
}

/// W += g xᵀ.
fn outer_acc(w: &mut [f64], cols: usize, g: &[f64], x: &[f64]) {
    for (r, &gr) in g.iter().enumerate() {
        if gr == 0.0 {
            continue;
        }
        for (wc, xc) in w[r * cols..(r + 1) * cols].iter_mut().zip(x) {
            *wc += gr * xc;
        }
    }
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn embed(w: &[f64], b: &[f64], feats: &[Features], h: usize) -> Vec<f64> {
    let mut out = vec![0.0; feats.len() * h];
    for (k, f) in feats.iter().enumerate() {
        let row = &mut out[k * h..(k + 1) * h];
        row.copy_from_slice(b);
        matvec_acc(w, N_FEATURES, f, row);
    }
    out
}

/// Applies `w` (h × h) to every row of `rows` (count × h).
fn project(w: &[f64], rows: &[f64], h: usize) -> Vec<f64> {
    let mut out = vec![0.0; rows.len()];
    for (src, dst) in rows.chunks_exact(h).zip(out.chunks_exact_mut(h)) {
        matvec_acc(w, h, src, dst);
    }
    out
}

struct LigandEdge {
    i: usize,
    j: usize,
    kind: usize,
    r: Vec3,
    d: f64,
    s: f64,
    ds: f64,
    phi: f64,
}

struct PocketEdge {
    j: usize,
    r: Vec3,
    d: f64,
    s: f64,
    ds: f64,
    phi: f64,
    /// exp(a − max a) over the ligand atom's pocket edges.
    e: f64,
    alpha: f64,
}

struct NodeTrace {
    input: Vec<f64>,
    pre: Vec<f64>,
    act: Vec<f64>,
}

struct BlockTrace {
    h: Vec<f64>,
    lig: Vec<LigandEdge>,
    lig_pre1: Vec<f64>,
    lig_u: Vec<f64>,
    lig_pre2: Vec<f64>,
    lig_m: Vec<f64>,
    poc: Vec<PocketEdge>,
    /// Pocket edges of ligand atom i are poc[poc_start[i]..poc_start[i+1]].
    poc_start: Vec<usize>,
    poc_pre: Vec<f64>,
    poc_m: Vec<f64>,
    poc_norm: Vec<f64>,
    node: Option<NodeTrace>,
}

/// Activations retained for the reverse pass.
pub(crate) struct Trace {
    t: usize,
    scale: f64,
    /// Scaled, centered input coordinates.
    x_in: Vec<Vec3>,
    g: Vec<f64>,
    blocks: Vec<BlockTrace>,
}

fn block_forward(
    p: &[f64],
    bo: &BlockOffsets,
    hd: usize,
    input: &ComplexInput,
    g: &[f64],
    x: &[Vec3],
    h: Vec<f64>,
) -> (Vec<Vec3>, Vec<f64>, BlockTrace) {
    let n = x.len();
    let m = input.n_pocket();
    let ys = &input.pocket_positions;
    let w = |off: usize, len: usize| &p[off..off + len];
    let hs = project(w(bo.a_src, hd * hd), &h, hd);
    let hdst = project(w(bo.a_dst, hd * hd), &h, hd);
    let hl = project(w(bo.c_lig, hd * hd), &h, hd);
    let pg = project(w(bo.c_poc, hd * hd), g, hd);
    let a_q = w(bo.a_q, hd);
    let a_bond = w(bo.a_bond, hd * N_BOND_TYPES);
    let a_b = w(bo.a_b, hd);
    let a2_w = w(bo.a2_w, hd * hd);
    let a2_b = w(bo.a2_b, hd);
    let gate_w = w(bo.gate_w, hd);
    let gate_b = p[bo.gate_b];
    let c_q = w(bo.c_q, hd);
    let c_b = w(bo.c_b, hd);
    let cgate_w = w(bo.cgate_w, hd);
    let cgate_b = p[bo.cgate_b];
    let attn_w = w(bo.attn_w, hd);

    let mut dx = vec![Vec3::zeros(); n];
    let mut agg_m = vec![0.0; n * hd];
    let mut lig = Vec::new();
    let (mut lig_pre1, mut lig_u, mut lig_pre2, mut lig_m) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut pre1 = vec![0.0; hd];
    let mut u = vec![0.0; hd];
    let mut pre2 = vec![0.0; hd];
    let mut msg = vec![0.0; hd];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let r = x[i] - x[j];
            let q = r.norm_squared();
            let d = q.sqrt();
            if d >= CUTOFF {
                continue;
            }
            let (s, ds) = switch(d);
            let kind = input.pair_type(i, j);
            for k in 0..hd {
                pre1[k] = hs[i * hd + k]
                    + hdst[j * hd + k]
                    + a_q[k] * q / DIST2_SCALE
                    + a_bond[k * N_BOND_TYPES + kind]
                    + a_b[k];
                u[k] = silu(pre1[k]);
            }
            pre2.copy_from_slice(a2_b);
            matvec_acc(a2_w, hd, &u, &mut pre2);
            for k in 0..hd {
                msg[k] = silu(pre2[k]);
            }
            let phi = dot(gate_w, &msg) + gate_b;
            dx[i] += r * (phi * s / (d + 1.0) / LIGAND_NORM);
            axpy(&mut agg_m[i * hd..(i + 1) * hd], s / LIGAND_NORM, &msg);
            lig.push(LigandEdge {
                i,
                j,
                kind,
                r,
                d,
                s,
                ds,
                phi,
            });
            lig_pre1.extend_from_slice(&pre1);
            lig_u.extend_from_slice(&u);
            lig_pre2.extend_from_slice(&pre2);
            lig_m.extend_from_slice(&msg);
        }
    }

    let mut agg_p = vec![0.0; n * hd];
    let mut poc = Vec::new();
    let mut poc_start = Vec::with_capacity(n + 1);
    let (mut poc_pre, mut poc_m) = (Vec::new(), Vec::new());
    let mut poc_norm = vec![0.0; n];
    let mut logits = Vec::new();
    for i in 0..n {
        poc_start.push(poc.len());
        logits.clear();
        for (j, y) in ys.iter().enumerate().take(m) {
            let r = x[i] - y;
            let q = r.norm_squared();
            let d = q.sqrt();
            if d >= CUTOFF {
                continue;
            }
            let (s, ds) = switch(d);
            for k in 0..hd {
                pre1[k] = hl[i * hd + k] + pg[j * hd + k] + c_q[k] * q / DIST2_SCALE + c_b[k];
                msg[k] = silu(pre1[k]);
            }
            let phi = dot(cgate_w, &msg) + cgate_b;
            dx[i] += r * (phi * s / (d + 1.0) / POCKET_NORM);
            logits.push(dot(attn_w, &msg));
            poc.push(PocketEdge {
                j,
                r,
                d,
                s,
                ds,
                phi,
                e: 0.0,
                alpha: 0.0,
            });
            poc_pre.extend_from_slice(&pre1);
            poc_m.extend_from_slice(&msg);
        }
        let start = poc_start[i];
        if logits.is_empty() {
            continue;
        }
        let amax = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut z = 0.0;
        for (edge, a) in poc[start..].iter_mut().zip(&logits) {
            edge.e = (a - amax).exp();
            z += edge.s * edge.e;
        }
        poc_norm[i] = z;
        if z > 0.0 {
            for (k, edge) in poc[start..].iter_mut().enumerate() {
                edge.alpha = edge.s * edge.e / z;
                let mk = &poc_m[(start + k) * hd..(start + k + 1) * hd];
                axpy(&mut agg_p[i * hd..(i + 1) * hd], edge.alpha, mk);
            }
        }
    }
    poc_start.push(poc.len());

    let x_new: Vec<Vec3> = x.iter().zip(&dx).map(|(a, b)| a + b).collect();
    let (h_new, node) = match &bo.node {
        Some(no) => {
            let mut v = vec![0.0; n * 3 * hd];
            let mut pre = vec![0.0; n * hd];
            let mut act = vec![0.0; n * hd];
            let mut h_new = h.clone();
            for i in 0..n {
                let vi = &mut v[i * 3 * hd..(i + 1) * 3 * hd];
                vi[..hd].copy_from_slice(&h[i * hd..(i + 1) * hd]);
                vi[hd..2 * hd].copy_from_slice(&agg_m[i * hd..(i + 1) * hd]);
                vi[2 * hd..].copy_from_slice(&agg_p[i * hd..(i + 1) * hd]);
                let pi = &mut pre[i * hd..(i + 1) * hd];
                pi.copy_from_slice(w(no.n1_b, hd));
                matvec_acc(w(no.n1_w, hd * 3 * hd), 3 * hd, vi, pi);
                let ai = &mut act[i * hd..(i + 1) * hd];
                for k in 0..hd {
                    ai[k] = silu(pi[k]);
                }
                let hi = &mut h_new[i * hd..(i + 1) * hd];
                axpy(hi, 1.0, w(no.n2_b, hd));
                matvec_acc(w(no.n2_w, hd * hd), hd, ai, hi);
            }
            (h_new, Some(NodeTrace { input: v, pre, act }))
        }
        None => (h.clone(), None),
    };
    (
        x_new,
        h_new,
        BlockTrace {
            h,
            lig,
            lig_pre1,
            lig_u,
            lig_pre2,
            lig_m,
            poc,
            poc_start,
            poc_pre,
            poc_m,
            poc_norm,
            node,
        },
    )
}

/// Runs the network on centered coordinates; returns centered output.
fn run(weights: &ModelWeights, layout: &Layout, input: &ComplexInput, noised: &[Vec3], t: usize) -> (Vec<Vec3>, Trace) {
    let hd = layout.hidden;
    let p = &weights.params;
    let scale = p[layout.in_scale + t - 1].exp();
    let x: Vec<Vec3> = noised.iter().map(|x| (x - input.center) * scale).collect();
    let mut h = embed(
        &p[layout.w_in..layout.w_in + hd * N_FEATURES],
        &p[layout.b_in..layout.b_in + hd],
        &input.ligand,
        hd,
    );
    let temb = &p[layout.time + (t - 1) * hd..layout.time + t * hd];
    for row in h.chunks_exact_mut(hd) {
        axpy(row, 1.0, temb);
    }
    let g = embed(
        &p[layout.w_p..layout.w_p + hd * N_FEATURES],
        &p[layout.b_p..layout.b_p + hd],
        &input.pocket,
        hd,
    );
    let x_in = x.clone();
    let mut x = x;
    let mut blocks = Vec::with_capacity(layout.blocks.len());
    for bo in &layout.blocks {
        let (x_new, h_new, trace) = block_forward(p, bo, hd, input, &g, &x, h);
        blocks.push(trace);
        x = x_new;
        h = h_new;
    }
    (
        x,
        Trace {
            t,
            scale,
            x_in,
            g,
            blocks,
        },
    )
}

fn check_inputs(weights: &ModelWeights, input: &ComplexInput, noised: &[Vec3], t: usize) -> Result<()> {
    if noised.len() != input.n_ligand() {
        return Err(Error::Contract(format!(
            "pose has {} atoms but the ligand has {} heavy atoms",
            noised.len(),
            input.n_ligand()
        )));
    }
    if t == 0 || t > weights.timesteps {
        return Err(Error::Contract(format!(
            "timestep {t} outside 1..={}",
            weights.timesteps
        )));
    }
    Ok(())
}

/// Predicts clean coordinates from `noised` at timestep `t`.
pub fn forward(weights: &ModelWeights, input: &ComplexInput, noised: &[Vec3], t: usize) -> Result<Vec<Vec3>> {
    Ok(forward_traced(weights, input, noised, t)?.0)
}

pub(crate) fn forward_traced(
    weights: &ModelWeights,
    input: &ComplexInput,
    noised: &[Vec3],
    t: usize,
) -> Result<(Vec<Vec3>, Trace)> {
    check_inputs(weights, input, noised, t)?;
    let layout = weights.layout();
    let (out, trace) = run(weights, &layout, input, noised, t);
    Ok((out.into_iter().map(|x| x + input.center).collect(), trace))
}

/// Pose-level wrapper around [`forward`].
pub fn forward_denoise(
    weights: &ModelWeights,
    receptor: &Receptor,
    pocket: &Pocket,
    mol: &Molecule,
    noised: &Pose,
    t: usize,
) -> Result<Pose> {
    let input = ComplexInput::new(receptor, pocket, mol)?;
    let coordinates = forward(weights, &input, &noised.coordinates, t)?;
    Ok(Pose::new(coordinates, Provenance::Predicted))
}

#[allow(clippy::too_many_arguments)]
fn block_backward(
    p: &[f64],
    grads: &mut [f64],
    bo: &BlockOffsets,
    hd: usize,
    input: &ComplexInput,
    g: &[f64],
    tr: &BlockTrace,
    gx_out: &[Vec3],
    gh_out: &[f64],
    gg: &mut [f64],
) -> (Vec<Vec3>, Vec<f64>) {
    let n = gx_out.len();
    let m = input.n_pocket();
    let mut gx = gx_out.to_vec();
    let mut gh = gh_out.to_vec();
    let mut g_agg_m = vec![0.0; n * hd];
    let mut g_agg_p = vec![0.0; n * hd];

    if let (Some(no), Some(nt)) = (&bo.node, &tr.node) {
        let mut gact = vec![0.0; hd];
        let mut gpre = vec![0.0; hd];
        let mut gv = vec![0.0; 3 * hd];
        for i in 0..n {
            let go = &gh_out[i * hd..(i + 1) * hd];
            axpy(&mut grads[no.n2_b..no.n2_b + hd], 1.0, go);
            outer_acc(
                &mut grads[no.n2_w..no.n2_w + hd * hd],
                hd,
                go,
                &nt.act[i * hd..(i + 1) * hd],
            );
            gact.fill(0.0);
            matvec_t_acc(&p[no.n2_w..no.n2_w + hd * hd], hd, go, &mut gact);
            for k in 0..hd {
                gpre[k] = gact[k] * dsilu(nt.pre[i * hd + k]);
            }
            axpy(&mut grads[no.n1_b..no.n1_b + hd], 1.0, &gpre);
            let vi = &nt.input[i * 3 * hd..(i + 1) * 3 * hd];
            outer_acc(&mut grads[no.n1_w..no.n1_w + 3 * hd * hd], 3 * hd, &gpre, vi);
            gv.fill(0.0);
            matvec_t_acc(&p[no.n1_w..no.n1_w + 3 * hd * hd], 3 * hd, &gpre, &mut gv);
            axpy(&mut gh[i * hd..(i + 1) * hd], 1.0, &gv[..hd]);
            g_agg_m[i * hd..(i + 1) * hd].copy_from_slice(&gv[hd..2 * hd]);
            g_agg_p[i * hd..(i + 1) * hd].copy_from_slice(&gv[2 * hd..]);
        }
    }

    let mut g_hs = vec![0.0; n * hd];
    let mut g_hdst = vec![0.0; n * hd];
    let mut g_hl = vec![0.0; n * hd];
    let mut g_pg = vec![0.0; m * hd];
    let a_q = &p[bo.a_q..bo.a_q + hd];
    let a2_w = &p[bo.a2_w..bo.a2_w + hd * hd];
    let gate_w = &p[bo.gate_w..bo.gate_w + hd];
    let c_q = &p[bo.c_q..bo.c_q + hd];
    let cgate_w = &p[bo.cgate_w..bo.cgate_w + hd];
    let attn_w = &p[bo.attn_w..bo.attn_w + hd];
    let mut gm = vec![0.0; hd];
    let mut gpre = vec![0.0; hd];
    let mut gu = vec![0.0; hd];

    for (k, e) in tr.lig.iter().enumerate() {
        let msg = &tr.lig_m[k * hd..(k + 1) * hd];
        let (i, j) = (e.i, e.j);
        let inv = 1.0 / (e.d + 1.0);
        let gxo = gx_out[i];
        let mut gr = gxo * (e.phi * e.s * inv / LIGAND_NORM);
        let gc = gxo.dot(&e.r);
        let g_agg = &g_agg_m[i * hd..(i + 1) * hd];
        let gs = dot(g_agg, msg) / LIGAND_NORM + gc * e.phi * inv / LIGAND_NORM;
        let gphi = gc * e.s * inv / LIGAND_NORM;
        let mut gd = -gc * e.phi * e.s * inv * inv / LIGAND_NORM;
        let ggate = gphi;
        axpy(&mut grads[bo.gate_w..bo.gate_w + hd], ggate, msg);
        grads[bo.gate_b] += ggate;
        for c in 0..hd {
            gm[c] = g_agg[c] * e.s / LIGAND_NORM + ggate * gate_w[c];
            gpre[c] = gm[c] * dsilu(tr.lig_pre2[k * hd + c]);
        }
        axpy(&mut grads[bo.a2_b..bo.a2_b + hd], 1.0, &gpre);
        outer_acc(
            &mut grads[bo.a2_w..bo.a2_w + hd * hd],
            hd,
            &gpre,
            &tr.lig_u[k * hd..(k + 1) * hd],
        );
        gu.fill(0.0);
        matvec_t_acc(a2_w, hd, &gpre, &mut gu);
        let q = e.d * e.d;
        let mut gq = 0.0;
        for c in 0..hd {
            let gp1 = gu[c] * dsilu(tr.lig_pre1[k * hd + c]);
            g_hs[i * hd + c] += gp1;
            g_hdst[j * hd + c] += gp1;
            grads[bo.a_q + c] += gp1 * q / DIST2_SCALE;
            grads[bo.a_bond + c * N_BOND_TYPES + e.kind] += gp1;
            grads[bo.a_b + c] += gp1;
            gq += gp1 * a_q[c] / DIST2_SCALE;
        }
        gd += gs * e.ds;
        gq += gd / (2.0 * e.d);
        gr += e.r * (2.0 * gq);
        gx[i] += gr;
        gx[j] -= gr;
    }

    for i in 0..n {
        let (start, end) = (tr.poc_start[i], tr.poc_start[i + 1]);
        if start == end {
            continue;
        }
        let gp = &g_agg_p[i * hd..(i + 1) * hd];
        let galpha: Vec<f64> = (start..end).map(|k| dot(gp, &tr.poc_m[k * hd..(k + 1) * hd])).collect();
        let gbar: f64 = (start..end).map(|k| tr.poc[k].alpha * galpha[k - start]).sum();
        let z = tr.poc_norm[i];
        for k in start..end {
            let e = &tr.poc[k];
            let msg = &tr.poc_m[k * hd..(k + 1) * hd];
            let delta = galpha[k - start] - gbar;
            let g_logit = e.alpha * delta;
            let g_s_attn = if z > 0.0 { e.e / z * delta } else { 0.0 };
            axpy(&mut grads[bo.attn_w..bo.attn_w + hd], g_logit, msg);
            let inv = 1.0 / (e.d + 1.0);
            let gxo = gx_out[i];
            let mut gr = gxo * (e.phi * e.s * inv / POCKET_NORM);
            let gc = gxo.dot(&e.r);
            let gphi = gc * e.s * inv / POCKET_NORM;
            let gs = g_s_attn + gc * e.phi * inv / POCKET_NORM;
            let mut gd = -gc * e.phi * e.s * inv * inv / POCKET_NORM;
            let gcg = gphi;
            axpy(&mut grads[bo.cgate_w..bo.cgate_w + hd], gcg, msg);
            grads[bo.cgate_b] += gcg;
            let q = e.d * e.d;
            let mut gq = 0.0;
            for c in 0..hd {
                let gmc = e.alpha * gp[c] + g_logit * attn_w[c] + gcg * cgate_w[c];
                let gpc = gmc * dsilu(tr.poc_pre[k * hd + c]);
                g_hl[i * hd + c] += gpc;
                g_pg[e.j * hd + c] += gpc;
                grads[bo.c_q + c] += gpc * q / DIST2_SCALE;
                grads[bo.c_b + c] += gpc;
                gq += gpc * c_q[c] / DIST2_SCALE;
            }
            gd += gs * e.ds;
            gq += gd / (2.0 * e.d);
            gr += e.r * (2.0 * gq);
            gx[i] += gr;
        }
    }

    let hh = hd * hd;
    for i in 0..n {
        let hi = &tr.h[i * hd..(i + 1) * hd];
        let ghi = &mut gh[i * hd..(i + 1) * hd];
        for (off, gsrc) in [(bo.a_src, &g_hs), (bo.a_dst, &g_hdst), (bo.c_lig, &g_hl)] {
            let gi = &gsrc[i * hd..(i + 1) * hd];
            outer_acc(&mut grads[off..off + hh], hd, gi, hi);
            matvec_t_acc(&p[off..off + hh], hd, gi, ghi);
        }
    }
    for j in 0..m {
        let gj = &g_pg[j * hd..(j + 1) * hd];
        outer_acc(&mut grads[bo.c_poc..bo.c_poc + hh], hd, gj, &g[j * hd..(j + 1) * hd]);
        matvec_t_acc(&p[bo.c_poc..bo.c_poc + hh], hd, gj, &mut gg[j * hd..(j + 1) * hd]);
    }
    (gx, gh)
}

/// Accumulates ∂loss/∂params into `grads` given ∂loss/∂output. Returns
/// ∂loss/∂input coordinates.
pub(crate) fn backward(
    weights: &ModelWeights,
    input: &ComplexInput,
    trace: &Trace,
    g_out: &[Vec3],
    grads: &mut [f64],
) -> Vec<Vec3> {
    let layout = weights.layout();
    let hd = layout.hidden;
    let p = &weights.params;
    let n = g_out.len();
    let mut gx = g_out.to_vec();
    let mut gh = vec![0.0; n * hd];
    let mut gg = vec![0.0; input.n_pocket() * hd];
    for (bo, tr) in layout.blocks.iter().zip(&trace.blocks).rev() {
        let (gx_in, gh_in) = block_backward(p, grads, bo, hd, input, &trace.g, tr, &gx, &gh, &mut gg);
        gx = gx_in;
        gh = gh_in;
    }
    let t = trace.t;
    grads[layout.in_scale + t - 1] += gx.iter().zip(&trace.x_in).map(|(g, x)| g.dot(x)).sum::<f64>();
    for (i, f) in input.ligand.iter().enumerate() {
        let ghi = &gh[i * hd..(i + 1) * hd];
        outer_acc(
            &mut grads[layout.w_in..layout.w_in + hd * N_FEATURES],
            N_FEATURES,
            ghi,
            f,
        );
        axpy(&mut grads[layout.b_in..layout.b_in + hd], 1.0, ghi);
        axpy(&mut grads[layout.time + (t - 1) * hd..layout.time + t * hd], 1.0, ghi);
    }
    for (j, f) in input.pocket.iter().enumerate() {
        let gj = &gg[j * hd..(j + 1) * hd];
        outer_acc(&mut grads[layout.w_p..layout.w_p + hd * N_FEATURES], N_FEATURES, gj, f);
        axpy(&mut grads[layout.b_p..layout.b_p + hd], 1.0, gj);
    }
    gx.iter().map(|g| g * trace.scale).collect()
}
