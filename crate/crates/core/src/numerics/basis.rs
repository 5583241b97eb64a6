//! Canonical kernel bases, stored as log-scaled jets on a grid.

use super::dopri::{integrate, Dopri5Options};
use super::model::OdeModel;
use super::sweep::{qr_sweep, scale_factor, scaled_rhs, Jet, Path, Sweep};
use crate::algebra::NcPolynomial;
use crate::config::{Config, Window};
use crate::diagonalization::{ExponentData, Frame};
use crate::error::{HsolvError, Result};
use crate::realization::Sign;
use crate::scalar::C64;

#[derive(Debug, Clone)]
pub struct BasisJet {
    pub sign: Sign,
    pub gamma_param: C64,
    pub path: Path,
    /// path parameters of the grid, increasing
    pub s_grid: Vec<f64>,
    pub t_grid: Vec<C64>,
    /// `jets[k][i]`: `(psi_k, psi_k', ...)` at grid point i
    pub jets: Vec<Vec<Jet>>,
    /// `anchor[k]`: jet at `s = 0`
    pub anchor: Vec<Jet>,
    pub frame_used: Frame,
    pub expo: ExponentData,
    pub model: OdeModel,
    /// root indices, most recessive first along the path
    pub recessive_order: Vec<usize>,
}

pub fn sweep_options(cfg: &Config) -> Dopri5Options {
    Dopri5Options { rtol: cfg.tol.rtol, atol: cfg.tol.atol, ..Dopri5Options::default() }
}

/// Rejects windows on which the exponents have not yet separated.
pub fn check_window(model: &OdeModel, path: &Path, s_lo: f64, s_hi: f64, re_threshold: f64) -> Result<()> {
    let n = model.n();
    let e = &model.expo;
    let d = path.dir;
    for a in 0..n {
        for b in a + 1..n {
            let lead = ((e.roots[a] - e.roots[b]) * d * d).re;
            if lead.abs() <= re_threshold {
                continue;
            }
            for s in [s_lo, s_hi] {
                let t = path.t(s);
                let slope = ((e.dphi(a, t) - e.dphi(b, t)) * d).re;
                if slope * lead <= 0.0 {
                    return Err(HsolvError::InvalidArgument(format!(
                        "window too small to stabilize asymptotics: exponents {a} and {b} not separated at s = {s}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Builds the basis along `path` for the grid `s_grid` (increasing, positive).
pub fn basis_on_path(model: &OdeModel, path: Path, s_grid: &[f64], cfg: &Config) -> Result<BasisJet> {
    let n = model.n();
    let s_max = *s_grid.last().ok_or_else(|| HsolvError::InvalidArgument("empty grid".into()))?;
    check_window(model, &path, s_grid[0], s_max, cfg.tol.re_threshold)?;
    let opts = sweep_options(cfg);
    let sweep = qr_sweep(model, path, cfg.far_factor * s_max, 0.0, s_grid, &opts)?;
    let (jets, anchor) = collect_jets(&sweep, s_grid, n)?;
    let det = anchor_det(&anchor);
    if det < 1e-10 {
        return Err(HsolvError::Independence(format!("anchor jet determinant {det:e}")));
    }
    Ok(BasisJet {
        sign: model.real.sign,
        gamma_param: model.expo.gamma_param(),
        path,
        s_grid: s_grid.to_vec(),
        t_grid: s_grid.iter().map(|&s| path.t(s)).collect(),
        jets,
        anchor,
        frame_used: model.frame.clone(),
        expo: model.expo.clone(),
        model: model.clone(),
        recessive_order: sweep.slots.clone(),
    })
}

fn node_index(nodes: &[f64], s: f64) -> Result<usize> {
    nodes
        .iter()
        .position(|&x| (x - s).abs() < 1e-12)
        .ok_or_else(|| HsolvError::Numerical(format!("grid point {s} missing from sweep nodes")))
}

fn collect_jets(sweep: &Sweep, s_grid: &[f64], n: usize) -> Result<(Vec<Vec<Jet>>, Vec<Jet>)> {
    let last = sweep.nodes.len() - 1;
    let mut want: Vec<usize> = s_grid.iter().map(|&s| node_index(&sweep.nodes, s)).collect::<Result<_>>()?;
    want.push(last);
    let mut jets = vec![Vec::new(); n];
    let mut anchor = vec![Jet { log_scale: C64::new(0.0, 0.0), mant: vec![] }; n];
    for m in 0..n {
        let k = sweep.slots[m];
        let reps = sweep.representative(m, &want)?;
        let mut grid_jets = Vec::with_capacity(s_grid.len());
        for (idx, jet) in reps {
            if idx == last {
                anchor[k] = jet.clone();
            }
            if idx != last || s_grid.iter().any(|&s| s.abs() < 1e-12) {
                grid_jets.push((idx, jet));
            }
        }
        // nodes decrease, grid increases
        grid_jets.sort_by(|a, b| b.0.cmp(&a.0));
        jets[k] = grid_jets.into_iter().map(|(_, j)| j).collect();
    }
    Ok((jets, anchor))
}

fn anchor_det(anchor: &[Jet]) -> f64 {
    let n = anchor.len();
    let m = nalgebra::DMatrix::from_fn(n, n, |i, k| anchor[k].mant[i]);
    m.determinant().norm()
}

/// Canonical basis of the realization with the given sign on `[t0, T]`.
pub fn canonical_basis(p: &NcPolynomial, sign: Sign, gamma: C64, window: &Window, cfg: &Config) -> Result<BasisJet> {
    window.validate()?;
    let model = OdeModel::for_operator(p, sign, gamma, &cfg.tol)?;
    basis_on_path(&model, Path::positive(), &window.grid(), cfg)
}

/// The same model on `t = -s`, `s` in the window.
pub fn mirrored_basis(model: &OdeModel, window: &Window, cfg: &Config) -> Result<BasisJet> {
    basis_on_path(model, Path::negative(), &window.grid(), cfg)
}

/// `t = s e^{-i theta}`, `s` in the window.
pub fn ray_basis(model: &OdeModel, theta: f64, window: &Window, cfg: &Config) -> Result<BasisJet> {
    basis_on_path(model, Path::ray(C64::new(0.0, 0.0), theta), &window.grid(), cfg)
}

impl BasisJet {
    pub fn n(&self) -> usize {
        self.jets.len()
    }

    /// `psi_k^{(n)}` at grid point i from the equation itself.
    pub fn top_derivative(&self, k: usize, i: usize) -> Jet {
        let n = self.n();
        let t = self.t_grid[i];
        let jet = &self.jets[k][i];
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..n {
            acc -= self.model.comp.c(j, t) * jet.mant[j];
        }
        Jet { log_scale: jet.log_scale, mant: vec![acc] }
    }

    /// Worst relative defect of each solution propagated between neighbouring grid points.
    pub fn jet_residuals(&self, rtol: f64) -> Result<Vec<f64>> {
        let n = self.n();
        let opts = Dopri5Options { rtol, atol: rtol * 1e-3, ..Dopri5Options::default() };
        let mut out = vec![0.0; n];
        let mut cbuf = vec![C64::new(0.0, 0.0); n];
        for k in 0..n {
            for i in 0..self.s_grid.len().saturating_sub(1) {
                let (s0, s1) = (self.s_grid[i], self.s_grid[i + 1]);
                let j0 = &self.jets[k][i];
                let j1 = &self.jets[k][i + 1];
                let y0: Vec<C64> = (0..n).map(|r| j0.mant[r] / scale_factor(s0, r)).collect();
                let f = |s: f64, y: &[C64], dy: &mut [C64]| scaled_rhs(&self.model, &self.path, s, y, dy, &mut cbuf);
                let (y1, _, _) = integrate(f, s0, &y0, s1, &[], &opts, None)?;
                let ratio = (j1.log_scale - j0.log_scale).exp();
                let mut num = 0.0;
                let mut den = 0.0;
                for r in 0..n {
                    let u = y1[r] * scale_factor(s1, r);
                    num += (u - j1.mant[r] * ratio).norm_sqr();
                    den += u.norm_sqr();
                }
                let d = (num / den).sqrt();
                if !d.is_finite() {
                    return Err(HsolvError::Numerical(format!("jet residual not finite at s = {s0}")));
                }
                out[k] = f64::max(out[k], d);
            }
        }
        Ok(out)
    }

    /// `log|psi_k^{(j)}| - Re Phi_k - j log(1+|t|)` over the grid.
    pub fn envelope_logs(&self, k: usize, j: usize) -> Vec<f64> {
        let n = self.n();
        (0..self.s_grid.len())
            .map(|i| {
                let t = self.t_grid[i];
                let la = if j < n { self.jets[k][i].log_abs(j) } else { self.top_derivative(k, i).log_abs(0) };
                la - self.expo.phi(k, t).re - j as f64 * (1.0 + t.norm()).ln()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_operator;

    fn harmonic() -> BasisJet {
        let p = parse_operator("-X^2 - Y^2").unwrap();
        let cfg = Config::default();
        canonical_basis(&p, Sign::Plus, C64::new(2.0, 0.0), &cfg.window, &cfg).unwrap()
    }

    #[test]
    fn harmonic_basis_follows_wkb() {
        let b = harmonic();
        for k in 0..2 {
            for v in b.envelope_logs(k, 0) {
                assert!(v.abs() < 0.05, "k={k} envelope {v}");
            }
        }
        // the second component over the first tends to gamma_k t
        let i = b.s_grid.len() - 1;
        for k in 0..2 {
            let r = b.jets[k][i].mant[1] / b.jets[k][i].mant[0];
            let want = b.expo.roots[k] * b.t_grid[i];
            assert!((r / want - 1.0).norm() < 0.01, "k={k} {r} vs {want}");
        }
    }

    #[test]
    fn jets_propagate_consistently() {
        let b = harmonic();
        for r in b.jet_residuals(1e-12).unwrap() {
            assert!(r < 1e-8, "residual {r}");
        }
    }

    #[test]
    fn numerical_derivative_matches_stored() {
        let b = harmonic();
        let i = 200;
        let h = b.s_grid[i + 1] - b.s_grid[i];
        for k in 0..2 {
            // log-derivative is nearly quadratic, so central differences are accurate
            let lv = |m: usize| b.jets[k][m].log_scale + b.jets[k][m].mant[0].ln();
            let d = (lv(i + 1) - lv(i - 1)) / (2.0 * h);
            let stored = b.jets[k][i].mant[1] / b.jets[k][i].mant[0];
            assert!((d / stored - 1.0).norm() < 1e-5, "{d} vs {stored}");
        }
    }

    #[test]
    fn short_window_is_rejected() {
        let p = parse_operator("-X^2 - Y^2 + 40*Y").unwrap();
        let cfg = Config::default();
        let w = Window::new(0.2, 1.0, 20).unwrap();
        let err = canonical_basis(&p, Sign::Plus, C64::new(1.0, 0.0), &w, &cfg);
        assert!(matches!(err, Err(HsolvError::InvalidArgument(_))), "{err:?}");
    }
}
