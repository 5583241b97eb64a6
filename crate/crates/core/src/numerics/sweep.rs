//! Backward QR sweep of the companion system along a path `t = z0 + s d`.
//!
//! Columns are seeded far out with the Levinson frame, most recessive first,
//! and integrated back toward `s = 0`. Re-orthonormalizing at every node keeps
//! the nested recessive subspaces (a flag) well conditioned.

use nalgebra::DMatrix;

use super::dopri::{integrate, Dopri5Options};
use super::model::OdeModel;
use crate::error::{HsolvError, Result};
use crate::scalar::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Path {
    pub z0: C64,
    pub dir: C64,
}

impl Path {
    pub fn positive() -> Self {
        Path { z0: C64::new(0.0, 0.0), dir: C64::new(1.0, 0.0) }
    }

    pub fn negative() -> Self {
        Path { z0: C64::new(0.0, 0.0), dir: C64::new(-1.0, 0.0) }
    }

    /// `t = z0 + s e^{-i theta}`.
    pub fn ray(z0: C64, theta: f64) -> Self {
        Path { z0, dir: C64::from_polar(1.0, -theta) }
    }

    pub fn t(&self, s: f64) -> C64 {
        self.z0 + self.dir * s
    }
}

/// Dominance key of root j along the path direction; larger grows faster.
pub fn dominance_key(model: &OdeModel, dir: C64, j: usize) -> (f64, f64, f64) {
    let e = &model.expo;
    ((e.roots[j] * dir * dir).re, (e.beta[j] * dir).re, e.rho[j].re)
}

/// Root indices sorted from most recessive to most dominant along `dir`.
pub fn recessive_order(model: &OdeModel, dir: C64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..model.n()).collect();
    idx.sort_by(|&a, &b| {
        let ka = dominance_key(model, dir, a);
        let kb = dominance_key(model, dir, b);
        ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1)).then(ka.2.total_cmp(&kb.2))
    });
    idx
}

#[derive(Debug, Clone)]
pub struct Sweep {
    pub path: Path,
    /// decreasing, from the seeding point to the anchor
    pub nodes: Vec<f64>,
    /// orthonormal frames at each node, in scaled coordinates
    pub q: Vec<DMatrix<C64>>,
    /// `r[0]` factors the seed; `r[i]` carries node `i-1` to node `i`
    pub r: Vec<DMatrix<C64>>,
    /// slot -> root index, most recessive first
    pub slots: Vec<usize>,
    /// `Phi` of each slot's root at the seeding point
    pub seed_phi: Vec<C64>,
}

/// Scaling `u_i = (1+s)^i u_hat_i` balances polynomial growth of derivatives.
pub fn scale_factor(s: f64, i: usize) -> f64 {
    (1.0 + s).powi(i as i32)
}

fn qr_positive(z: DMatrix<C64>) -> (DMatrix<C64>, DMatrix<C64>) {
    let n = z.ncols();
    let qr = z.qr();
    let mut q = qr.q();
    let mut r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let m = d.norm();
        if m > 0.0 {
            let ph = d / m;
            for i in 0..q.nrows() {
                q[(i, j)] *= ph;
            }
            for k in 0..r.ncols() {
                r[(j, k)] /= ph;
            }
        }
    }
    (q, r)
}

/// Right side of the scaled system `d u_hat/ds`.
pub fn scaled_rhs(model: &OdeModel, path: &Path, s: f64, y: &[C64], out: &mut [C64], cbuf: &mut [C64]) {
    let n = model.n();
    let t = path.t(s);
    let d = path.dir;
    let p = 1.0 + s;
    for j in 0..n {
        cbuf[j] = -d * model.comp.c(j, t) * p.powi(j as i32 + 1 - n as i32);
    }
    let cols = y.len() / n;
    for c in 0..cols {
        let col = &y[c * n..(c + 1) * n];
        let o = &mut out[c * n..(c + 1) * n];
        for i in 0..n - 1 {
            o[i] = d * p * col[i + 1] - col[i] * (i as f64 / p);
        }
        let mut last = C64::new(0.0, 0.0);
        for j in 0..n {
            last += cbuf[j] * col[j];
        }
        o[n - 1] = last - col[n - 1] * ((n - 1) as f64 / p);
    }
}

/// Inserts nodes so that relative growth between neighbours stays moderate.
fn build_nodes(model: &OdeModel, dir: C64, s_far: f64, s_anchor: f64, extra: &[f64]) -> Vec<f64> {
    let n = model.n();
    let mut spread: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            spread = spread.max(((model.roots()[a] - model.roots()[b]) * dir * dir).re.abs());
        }
    }
    let mut pts: Vec<f64> = extra.iter().copied().filter(|s| *s > s_anchor && *s < s_far).collect();
    pts.push(s_far);
    pts.push(s_anchor);
    pts.sort_by(|a, b| b.total_cmp(a));
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
    let mut out = vec![pts[0]];
    for w in pts.windows(2) {
        let (hi, lo) = (w[0], w[1]);
        let mut s = hi;
        loop {
            let step = (4.0 / (spread * s.max(1.0) + 1e-300)).min(0.5);
            if s - step <= lo + 1e-12 {
                break;
            }
            s -= step;
            out.push(s);
        }
        out.push(lo);
    }
    out
}

pub fn qr_sweep(
    model: &OdeModel,
    path: Path,
    s_far: f64,
    s_anchor: f64,
    extra_nodes: &[f64],
    opts: &Dopri5Options,
) -> Result<Sweep> {
    let n = model.n();
    if !(s_far > s_anchor) {
        return Err(HsolvError::InvalidArgument(format!("sweep needs s_far > anchor, got {s_far} <= {s_anchor}")));
    }
    let slots = recessive_order(model, path.dir);
    let nodes = build_nodes(model, path.dir, s_far, s_anchor, extra_nodes);
    let t_far = path.t(s_far);
    let seed = model.seed(t_far);
    let mut y0 = DMatrix::zeros(n, n);
    for (m, &k) in slots.iter().enumerate() {
        for i in 0..n {
            y0[(i, m)] = seed[(i, k)] / scale_factor(s_far, i);
        }
    }
    let seed_phi = slots.iter().map(|&k| model.expo.phi(k, t_far)).collect();
    let (q0, r0) = qr_positive(y0);
    let mut qs = vec![q0];
    let mut rs = vec![r0];
    let mut cbuf = vec![C64::new(0.0, 0.0); n];
    let mut h_hint: Option<f64> = None;
    for w in nodes.windows(2) {
        let (a, b) = (w[0], w[1]);
        let cur = qs.last().expect("seeded");
        let f = |s: f64, y: &[C64], dy: &mut [C64]| scaled_rhs(model, &path, s, y, dy, &mut cbuf);
        let o = Dopri5Options { h_init: h_hint.map(|h| h.min((a - b).abs())), ..*opts };
        let (yend, _, stats) = integrate(f, a, cur.as_slice(), b, &[], &o, None)?;
        h_hint = Some(stats.last_h);
        let z = DMatrix::from_column_slice(n, n, &yend);
        if !z.iter().all(|v| v.is_finite()) {
            return Err(HsolvError::Numerical(format!("non-finite state in sweep at s = {b}")));
        }
        let (q, r) = qr_positive(z);
        qs.push(q);
        rs.push(r);
    }
    Ok(Sweep { path, nodes, q: qs, r: rs, slots, seed_phi })
}

/// Values in log form: the vector is `exp(log_scale) * mant`, `|mant| = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub log_scale: C64,
    pub mant: Vec<C64>,
}

impl Jet {
    pub fn from_vector(log_scale: C64, v: Vec<C64>) -> Self {
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm == 0.0 || !nrm.is_finite() {
            return Jet { log_scale, mant: v };
        }
        Jet { log_scale: log_scale + nrm.ln(), mant: v.into_iter().map(|z| z / nrm).collect() }
    }

    pub fn value(&self) -> Vec<C64> {
        let s = self.log_scale.exp();
        self.mant.iter().map(|z| z * s).collect()
    }

    /// `log |component i|`.
    pub fn log_abs(&self, i: usize) -> f64 {
        self.log_scale.re + self.mant[i].norm().ln()
    }

    pub fn phase(&self, i: usize) -> f64 {
        (self.mant[i] * C64::from_polar(1.0, self.log_scale.im)).arg()
    }
}

impl Sweep {
    pub fn anchor_q(&self) -> &DMatrix<C64> {
        self.q.last().expect("non-empty sweep")
    }

    /// Jets at the requested nodes of the representative of slot `m` that is
    /// orthogonal, at the anchor, to the more recessive slots.
    pub fn representative(&self, m: usize, want: &[usize]) -> Result<Vec<(usize, Jet)>> {
        let n = self.q[0].nrows();
        let last = self.nodes.len() - 1;
        let mut log_l = self.seed_phi[m];
        for r in &self.r {
            log_l += r[(m, m)].re.ln();
        }
        let mut c = vec![C64::new(0.0, 0.0); m + 1];
        c[m] = C64::new(1.0, 0.0);
        let mut out = Vec::with_capacity(want.len());
        let mut wanted = vec![false; self.nodes.len()];
        for &w in want {
            wanted[w] = true;
        }
        let mut i = last;
        loop {
            if wanted[i] {
                let s = self.nodes[i];
                let q = &self.q[i];
                let v: Vec<C64> = (0..n)
                    .map(|r| (0..=m).map(|k| q[(r, k)] * c[k]).sum::<C64>() * scale_factor(s, r))
                    .collect();
                out.push((i, Jet::from_vector(log_l, v)));
            }
            if i == 0 {
                break;
            }
            // move one node outward: c <- (R_i / R_i[m,m])^-1 c
            let r = &self.r[i];
            let rmm = r[(m, m)];
            let mut next = vec![C64::new(0.0, 0.0); m + 1];
            next[m] = c[m];
            for row in (0..m).rev() {
                let mut acc = c[row];
                for k in row + 1..=m {
                    acc -= r[(row, k)] / rmm * next[k];
                }
                let d = r[(row, row)] / rmm;
                if d.norm() == 0.0 {
                    return Err(HsolvError::Singular(format!("sweep factor at node {i}")));
                }
                next[row] = acc / d;
            }
            c = next;
            log_l -= rmm.re.ln();
            i -= 1;
        }
        out.reverse();
        Ok(out)
    }
}
