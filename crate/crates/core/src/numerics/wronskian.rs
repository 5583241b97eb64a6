//! Wronskians, cofactor quotients `h_l = W_l / W` and the adjoint kernel.

use nalgebra::{DMatrix, DVector};

use super::basis::BasisJet;
use super::sweep::Jet;
use crate::error::{HsolvError, Result};
use crate::realization::eval_poly;
use crate::scalar::C64;

/// Smallest `|det|` of the normalized jet matrix accepted as independent.
pub const W_FLOOR: f64 = 1e-14;

type PolyVec = Vec<Vec<C64>>;

fn padd(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); a.len().max(b.len())];
    for (i, v) in a.iter().enumerate() {
        out[i] += v;
    }
    for (i, v) in b.iter().enumerate() {
        out[i] += v;
    }
    out
}

fn pmul(a: &[C64], b: &[C64]) -> Vec<C64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![C64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn pderiv(a: &[C64]) -> Vec<C64> {
    a.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect()
}

/// `x_0 = e_n`, `x_{r+1} = x_r' - A x_r`, so that `h^{(r)} = J^{-1} x_r`.
pub fn cofactor_drivers(polys: &[Vec<C64>], order: usize) -> Vec<PolyVec> {
    let n = polys.len();
    let mut x: PolyVec = vec![vec![]; n];
    x[n - 1] = vec![C64::new(1.0, 0.0)];
    let mut out = vec![x.clone()];
    for _ in 0..order {
        let mut next: PolyVec = x.iter().map(|p| pderiv(p)).collect();
        for i in 0..n - 1 {
            next[i] = padd(&next[i], &x[i + 1].iter().map(|c| -c).collect::<Vec<_>>());
        }
        let mut acc = vec![];
        for j in 0..n {
            acc = padd(&acc, &pmul(&polys[j], &x[j]));
        }
        next[n - 1] = padd(&next[n - 1], &acc);
        out.push(next.clone());
        x = next;
    }
    out
}

#[derive(Debug, Clone)]
pub struct WronskianData {
    /// `log W` with continuous imaginary part
    pub log_w: Vec<C64>,
    /// `h[l][i]`: `(h_l, h_l', ..., h_l^{(n)})` at grid point i
    pub h: Vec<Vec<Jet>>,
}

impl WronskianData {
    /// `log W_l = log W + log h_l`.
    pub fn log_minor(&self, l: usize, i: usize) -> C64 {
        self.log_w[i] + self.h[l][i].log_scale + self.h[l][i].mant[0].ln()
    }
}

fn unwrap_phase(v: &mut [C64]) {
    for i in 1..v.len() {
        let mut d = v[i].im - v[i - 1].im;
        while d > std::f64::consts::PI {
            v[i].im -= 2.0 * std::f64::consts::PI;
            d -= 2.0 * std::f64::consts::PI;
        }
        while d < -std::f64::consts::PI {
            v[i].im += 2.0 * std::f64::consts::PI;
            d += 2.0 * std::f64::consts::PI;
        }
    }
}

pub fn wronskians(basis: &BasisJet) -> Result<WronskianData> {
    let n = basis.n();
    let drivers = cofactor_drivers(&basis.model.comp.polys, n);
    let m = basis.s_grid.len();
    let mut log_w = Vec::with_capacity(m);
    let mut h = vec![Vec::with_capacity(m); n];
    for i in 0..m {
        let t = basis.t_grid[i];
        let mant = DMatrix::from_fn(n, n, |r, k| basis.jets[k][i].mant[r]);
        let det = mant.determinant();
        if det.norm() < W_FLOOR {
            return Err(HsolvError::Independence(format!("Wronskian below floor at t = {t}")));
        }
        let ls: C64 = (0..n).map(|k| basis.jets[k][i].log_scale).sum();
        log_w.push(ls + det.ln());
        let lu = mant.lu();
        let sols: Vec<DVector<C64>> = drivers
            .iter()
            .map(|x| {
                let rhs = DVector::from_iterator(n, x.iter().map(|p| eval_poly(p, t)));
                lu.solve(&rhs).ok_or_else(|| HsolvError::Singular(format!("jet matrix at t = {t}")))
            })
            .collect::<Result<_>>()?;
        for l in 0..n {
            let v: Vec<C64> = sols.iter().map(|s| s[l]).collect();
            h[l].push(Jet::from_vector(-basis.jets[l][i].log_scale, v));
        }
    }
    unwrap_phase(&mut log_w);
    Ok(WronskianData { log_w, h })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbelReport {
    /// worst `|d/ds log W - d tr A| / max(1, |tr A|)` on the interior
    pub max_defect: f64,
    /// least-squares fit `d/dt log W ~ slope t + intercept`
    pub slope: C64,
    pub intercept: C64,
    /// spread of `Re(log W - sum Phi_j) - n(n-1)/2 ln|t|` over the grid
    pub growth_spread: f64,
}

pub fn abel_check(basis: &BasisJet, w: &WronskianData) -> Result<AbelReport> {
    let s = &basis.s_grid;
    let m = s.len();
    if m < 5 {
        return Err(HsolvError::InvalidArgument("Abel check needs at least 5 grid points".into()));
    }
    let d = basis.path.dir;
    let mut max_defect: f64 = 0.0;
    let mut pts = Vec::new();
    for i in 2..m - 2 {
        let h = (s[i + 2] - s[i - 2]) / 4.0;
        let fd = (-w.log_w[i + 2] + w.log_w[i + 1] * 8.0 - w.log_w[i - 1] * 8.0 + w.log_w[i - 2]) / (12.0 * h);
        let tr = basis.model.comp.trace(basis.t_grid[i]) * d;
        max_defect = max_defect.max((fd - tr).norm() / tr.norm().max(1.0));
        pts.push((basis.t_grid[i], fd / d));
    }
    // complex least squares for slope and intercept
    let k = pts.len() as f64;
    let st: C64 = pts.iter().map(|p| p.0).sum();
    let stt: C64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sy: C64 = pts.iter().map(|p| p.1).sum();
    let sty: C64 = pts.iter().map(|p| p.0 * p.1).sum();
    let den = stt * k - st * st;
    let slope = (sty * k - st * sy) / den;
    let intercept = (sy - slope * st) / k;
    let n = basis.n();
    let e = &basis.expo;
    let g: Vec<f64> = (0..m)
        .map(|i| {
            let t = basis.t_grid[i];
            let sum: C64 = (0..n).map(|j| e.phi(j, t)).sum();
            w.log_w[i].re - sum.re - (n * (n - 1) / 2) as f64 * t.norm().ln()
        })
        .collect();
    let hi = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = g.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(AbelReport { max_defect, slope, intercept, growth_spread: hi - lo })
}

#[derive(Debug, Clone)]
pub struct AdjointKernel {
    /// `jets[l][i]`: `(conj h_l, ..., conj h_l^{(n)})`
    pub jets: Vec<Vec<Jet>>,
    /// worst `|L* conj h_l| / scale` over the grid, per l
    pub residuals: Vec<f64>,
}

/// Conjugated quotients and their residual under the formal adjoint.
pub fn adjoint_kernel_basis(basis: &BasisJet, w: &WronskianData) -> Result<AdjointKernel> {
    if basis.t_grid.iter().any(|t| t.im != 0.0) {
        return Err(HsolvError::InvalidArgument("adjoint kernel needs a real grid".into()));
    }
    let adj = basis.model.real.formal_adjoint();
    let ginv = basis.model.ginv.conj();
    let n = basis.n();
    let mut jets = vec![Vec::new(); n];
    let mut residuals = vec![0.0; n];
    for l in 0..n {
        for (i, hj) in w.h[l].iter().enumerate() {
            let t = basis.t_grid[i];
            let cj = Jet { log_scale: hj.log_scale.conj(), mant: hj.mant.iter().map(|z| z.conj()).collect() };
            let r = adj.apply_jet(&cj.mant, t, ginv).norm();
            let sc = adj.apply_jet_scale(&cj.mant, t, ginv);
            let ratio = if sc > 0.0 { r / sc } else { 0.0 };
            if !ratio.is_finite() {
                return Err(HsolvError::Numerical(format!("adjoint residual not finite at t = {t}")));
            }
            residuals[l] = f64::max(residuals[l], ratio);
            jets[l].push(cj);
        }
    }
    Ok(AdjointKernel { jets, residuals })
}
