//! The w-equation with the leading exponent factored out, and reduction of order.

use nalgebra::DMatrix;

use super::dopri::{integrate, DenseSolution, Dopri5Options};
use super::model::OdeModel;
use super::sweep::{recessive_order, Path};
use crate::diagonalization::ReducedSystem;
use crate::error::{HsolvError, Result};
use crate::scalar::C64;

/// A linear system `w' = M(t) w` whose forcing part has a computable size.
pub trait WSystem {
    fn n(&self) -> usize;
    fn matrix(&self, t: f64) -> Result<DMatrix<C64>>;
    /// Norm of the off-diagonal forcing, used for the growth bound.
    fn forcing_norm(&self, t: f64) -> Result<f64>;
}

impl WSystem for ReducedSystem {
    fn n(&self) -> usize {
        ReducedSystem::n(self)
    }

    fn matrix(&self, t: f64) -> Result<DMatrix<C64>> {
        self.w_matrix(C64::new(t, 0.0))
    }

    fn forcing_norm(&self, t: f64) -> Result<f64> {
        Ok(self.remainder(C64::new(t, 0.0))?.norm())
    }
}

/// The v-system `v' = B v` together with its exponents.
pub trait VSystem {
    fn n(&self) -> usize;
    fn b(&self, t: f64) -> Result<DMatrix<C64>>;
    fn dphi(&self, j: usize, t: f64) -> C64;
}

impl VSystem for ReducedSystem {
    fn n(&self) -> usize {
        ReducedSystem::n(self)
    }

    fn b(&self, t: f64) -> Result<DMatrix<C64>> {
        ReducedSystem::b(self, C64::new(t, 0.0))
    }

    fn dphi(&self, j: usize, t: f64) -> C64 {
        self.expo.dphi(j, C64::new(t, 0.0))
    }
}

#[derive(Debug, Clone)]
pub struct WTrajectory {
    /// output points, decreasing
    pub t: Vec<f64>,
    pub w: Vec<Vec<C64>>,
    /// `exp(int_t^y 2|R|)` at each output point
    pub bound: Vec<f64>,
    pub dense: DenseSolution,
}

fn matvec(m: &DMatrix<C64>, y: &[C64], out: &mut [C64]) {
    for i in 0..m.nrows() {
        out[i] = (0..m.ncols()).map(|j| m[(i, j)] * y[j]).sum();
    }
}

/// Integrates backward from `from_t` to `to_t`, checking `|w| <= slack * exp(int 2|R|)`.
pub fn integrate_w<W: WSystem>(
    sys: &W,
    from_t: f64,
    to_t: f64,
    init: &[C64],
    grid: &[f64],
    opts: &Dopri5Options,
    slack: f64,
) -> Result<WTrajectory> {
    if !(from_t > to_t && to_t > 0.0) {
        return Err(HsolvError::InvalidArgument(format!("need from_t > to_t > 0, got {from_t}, {to_t}")));
    }
    if init.len() != sys.n() {
        return Err(HsolvError::InvalidArgument("initial vector has wrong length".into()));
    }
    let mut outs: Vec<f64> = grid.iter().copied().filter(|&t| t <= from_t && t >= to_t).collect();
    outs.push(to_t);
    outs.push(from_t);
    outs.sort_by(|a, b| b.total_cmp(a));
    outs.dedup();
    let mut err = None;
    let f = |t: f64, y: &[C64], dy: &mut [C64]| match sys.matrix(t) {
        Ok(m) => matvec(&m, y, dy),
        Err(e) => {
            err.get_or_insert(e);
            dy.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        }
    };
    let mut dense = DenseSolution::default();
    let (_, ws, _) = integrate(f, from_t, init, to_t, &outs, opts, Some(&mut dense))?;
    if let Some(e) = err {
        return Err(e);
    }
    // trapezoid on a fine mesh for the forcing integral
    let mut bound = Vec::with_capacity(outs.len());
    let mut acc = 0.0;
    let mut prev_t = outs[0];
    let mut prev_r = sys.forcing_norm(prev_t)?;
    let w0 = init.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for (i, &t) in outs.iter().enumerate() {
        let sub = 8;
        for s in 1..=sub {
            let tt = prev_t + (t - prev_t) * s as f64 / sub as f64;
            let r = sys.forcing_norm(tt)?;
            acc += (prev_r + r) * (prev_t - tt).abs();
            prev_r = r;
            prev_t = tt;
        }
        let b = acc.exp();
        let nw = ws[i].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nw > slack * w0 * b {
            return Err(HsolvError::BoundViolation(format!("|w| = {nw:e} exceeds {slack} * {b:e} at t = {t}")));
        }
        bound.push(b);
    }
    Ok(WTrajectory { t: outs, w: ws, bound, dense })
}

/// Solution of the w-equation for the most recessive exponent on the positive axis.
pub fn leading_w(model: &OdeModel, y: f64, grid: &[f64], opts: &Dopri5Options, slack: f64) -> Result<(usize, WTrajectory)> {
    let k = recessive_order(model, Path::positive().dir)[0];
    let sys = model.reduced(k)?;
    let t_lo = grid.iter().copied().fold(y, f64::min);
    sys.check_recessive(t_lo, y)?;
    let mut e = vec![C64::new(0.0, 0.0); model.n()];
    e[k] = C64::new(1.0, 0.0);
    Ok((k, integrate_w(&sys, y, t_lo, &e, grid, opts, slack)?))
}

#[derive(Debug, Clone)]
pub struct NextSolution {
    /// the pivot: leading index of the known solution
    pub k: usize,
    /// leading index of the new solution
    pub k2: usize,
    /// increasing grid
    pub t: Vec<f64>,
    /// the new solution is `e^{Phi_k2} w2` in v-coordinates
    pub w2: Vec<Vec<C64>>,
    /// `g = h e^{Phi_k - Phi_k2}`, where `h` multiplies the known solution
    pub g: Vec<C64>,
    /// `sup |g| t` over the grid
    pub g_bound: f64,
}

/// Builds the solution for the next exponent from the most recessive one by
/// splitting off the known solution at the pivot component.
pub fn reduction_of_order(model: &OdeModel, y: f64, grid: &[f64], opts: &Dopri5Options) -> Result<NextSolution> {
    if model.n() < 2 {
        return Err(HsolvError::InvalidArgument("reduction of order needs n >= 2".into()));
    }
    let order = recessive_order(model, Path::positive().dir);
    let sys = model.reduced(order[0])?;
    let t0 = grid.iter().copied().fold(f64::INFINITY, f64::min);
    if t0 > 0.0 {
        sys.check_recessive(t0, y)?;
    }
    reduce_system(&sys, order[0], order[1], y, grid, opts)
}

/// Reduction of order on any v-system; `k` must be the most recessive index.
pub fn reduce_system<V: VSystem>(
    sys: &V,
    k: usize,
    k2: usize,
    y: f64,
    grid: &[f64],
    opts: &Dopri5Options,
) -> Result<NextSolution> {
    let n = sys.n();
    if k == k2 || k >= n || k2 >= n {
        return Err(HsolvError::InvalidArgument(format!("bad index pair ({k}, {k2})")));
    }
    let t0 = grid.iter().copied().fold(f64::INFINITY, f64::min);
    let t1 = grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(t0 > 0.0 && y >= t1) {
        return Err(HsolvError::InvalidArgument("grid must lie in (0, y]".into()));
    }
    let others: Vec<usize> = (0..n).filter(|&i| i != k).collect();
    let pos2 = others.iter().position(|&i| i == k2).expect("k2 differs from k");
    let m = others.len();
    let mut err = None;
    // state: w (n) followed by w-hat (n - 1) on the indices other than k
    let f = |t: f64, y: &[C64], dy: &mut [C64]| {
        let b = match sys.b(t) {
            Ok(b) => b,
            Err(e) => {
                err.get_or_insert(e);
                dy.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
                return;
            }
        };
        let lk = sys.dphi(k, t);
        let lk2 = sys.dphi(k2, t);
        let (w, wh) = y.split_at(n);
        for i in 0..n {
            dy[i] = (0..n).map(|j| b[(i, j)] * w[j]).sum::<C64>() - lk * w[i];
        }
        let wp = w[k];
        for (a, &i) in others.iter().enumerate() {
            let mut acc = -lk2 * wh[a];
            for (c, &j) in others.iter().enumerate() {
                acc += (b[(i, j)] - w[i] / wp * b[(k, j)]) * wh[c];
            }
            dy[n + a] = acc;
        }
    };
    let mut init = vec![C64::new(0.0, 0.0); n + m];
    init[k] = C64::new(1.0, 0.0);
    init[n + pos2] = C64::new(1.0, 0.0);
    let mut dense = DenseSolution::default();
    integrate(f, y, &init, t0, &[], opts, Some(&mut dense))?;
    if let Some(e) = err {
        return Err(e);
    }
    let mut err = None;
    // forward equation for g from g(t0) = 0
    let fg = |t: f64, g: &[C64], dg: &mut [C64]| {
        let st = dense.eval(t);
        let b = match sys.b(t) {
            Ok(b) => b,
            Err(e) => {
                err.get_or_insert(e);
                dg[0] = C64::new(0.0, 0.0);
                return;
            }
        };
        let drive: C64 = others.iter().enumerate().map(|(c, &j)| b[(k, j)] * st[n + c]).sum::<C64>() / st[k];
        dg[0] = drive - (sys.dphi(k2, t) - sys.dphi(k, t)) * g[0];
    };
    let mut sorted: Vec<f64> = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (_, gs, _) = integrate(fg, t0, &[C64::new(0.0, 0.0)], t1, &sorted, opts, None)?;
    if let Some(e) = err {
        return Err(e);
    }
    let mut w2 = Vec::with_capacity(sorted.len());
    let mut g = Vec::with_capacity(sorted.len());
    let mut g_bound: f64 = 0.0;
    for (i, &t) in sorted.iter().enumerate() {
        let st = dense.eval(t);
        if st[k].norm() < 1e-8 {
            return Err(HsolvError::Numerical(format!("pivot component vanishes at t = {t}")));
        }
        let gi = gs[i][0];
        let mut v: Vec<C64> = st[..n].iter().map(|z| z * gi).collect();
        for (c, &j) in others.iter().enumerate() {
            v[j] += st[n + c];
        }
        g_bound = g_bound.max(gi.norm() * t);
        w2.push(v);
        g.push(gi);
    }
    Ok(NextSolution { k, k2, t: sorted, w2, g, g_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_operator;
    use crate::config::Tolerances;
    use crate::realization::Sign;

    struct Diagonal(Vec<C64>);

    impl WSystem for Diagonal {
        fn n(&self) -> usize {
            self.0.len()
        }
        fn matrix(&self, _t: f64) -> Result<DMatrix<C64>> {
            Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.0.clone())))
        }
        fn forcing_norm(&self, _t: f64) -> Result<f64> {
            Ok(0.0)
        }
    }

    fn model(text: &str, gamma: f64) -> OdeModel {
        OdeModel::for_operator(&parse_operator(text).unwrap(), Sign::Plus, C64::new(gamma, 0.0), &Tolerances::default()).unwrap()
    }

    #[test]
    fn unforced_w_is_constant() {
        let sys = Diagonal(vec![C64::new(0.0, 0.0), C64::new(3.0, 0.0)]);
        let init = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let tr = integrate_w(&sys, 10.0, 1.0, &init, &[5.0], &Dopri5Options::default(), 1.01).unwrap();
        for w in &tr.w {
            assert_eq!(w[0], C64::new(1.0, 0.0));
            assert_eq!(w[1], C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn harmonic_w_decays_like_inverse_t() {
        let m = model("-X^2 - Y^2", 1.0);
        let grid: Vec<f64> = (10..=40).map(|t| t as f64).collect();
        let (k, tr) = leading_w(&m, 40.0, &grid, &Dopri5Options::default(), 1.5).unwrap();
        let other = 1 - k;
        for (t, w) in tr.t.iter().zip(&tr.w) {
            assert!(w[other].norm() * t < 0.5, "t={t} w={:?}", w);
        }
        // Cauchy in the terminal point
        let (_, tr20) = leading_w(&m, 20.0, &grid, &Dopri5Options::default(), 1.5).unwrap();
        for (t, w) in tr20.t.iter().zip(&tr20.w) {
            let j = tr.t.iter().position(|s| s == t).unwrap();
            let d: f64 = (0..2).map(|i| (w[i] - tr.w[j][i]).norm_sqr()).sum::<f64>().sqrt();
            assert!(d * 20.0 < 1.0, "t={t} d={d}");
        }
    }

    #[test]
    fn second_solution_has_next_exponent() {
        let m = model("-X^2 - Y^2 + (1+2i)*Y", 3.0);
        let grid: Vec<f64> = (0..=100).map(|i| 5.0 + 0.1 * i as f64).collect();
        let ns = reduction_of_order(&m, 30.0, &grid, &Dopri5Options::default()).unwrap();
        assert!(ns.g_bound.is_finite() && ns.g_bound < 10.0, "{}", ns.g_bound);
        let last = ns.w2.last().unwrap();
        assert!((last[ns.k2] - C64::new(1.0, 0.0)).norm() < 0.1);
        // the reassembled vector solves its own w-equation
        let sys = m.reduced(ns.k2).unwrap();
        let i = 50;
        let h = ns.t[i + 1] - ns.t[i];
        let mat = sys.w_matrix(C64::new(ns.t[i], 0.0)).unwrap();
        for r in 0..2 {
            let fd = (ns.w2[i + 1][r] - ns.w2[i - 1][r]) / (2.0 * h);
            let rhs: C64 = (0..2).map(|j| mat[(r, j)] * ns.w2[i][j]).sum();
            assert!((fd - rhs).norm() < 1e-3 * (1.0 + rhs.norm()), "{fd} vs {rhs}");
        }
    }

    struct Decoupled;

    impl VSystem for Decoupled {
        fn n(&self) -> usize {
            2
        }
        fn b(&self, t: f64) -> Result<DMatrix<C64>> {
            // pivot row carries no coupling; the other row does
            Ok(DMatrix::from_row_slice(2, 2, &[
                C64::new(-t, 0.0), C64::new(0.0, 0.0),
                C64::new(1.0 / (t * t), 0.0), C64::new(t, 0.0),
            ]))
        }
        fn dphi(&self, j: usize, t: f64) -> C64 {
            C64::new(if j == 0 { -t } else { t }, 0.0)
        }
    }

    #[test]
    fn zero_coupling_leaves_g_zero() {
        let grid: Vec<f64> = (5..=15).map(|t| t as f64).collect();
        let ns = reduce_system(&Decoupled, 0, 1, 30.0, &grid, &Dopri5Options::default()).unwrap();
        assert!(ns.g.iter().all(|g| g.norm() == 0.0));
        for w in &ns.w2 {
            assert_eq!(w[0], C64::new(0.0, 0.0));
            assert!((w[1] - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn harmonic_g_bound_is_finite() {
        let m = model("-X^2 - Y^2", 2.0);
        let grid: Vec<f64> = (0..=100).map(|i| 5.0 + 0.1 * i as f64).collect();
        let ns = reduction_of_order(&m, 30.0, &grid, &Dopri5Options::default()).unwrap();
        assert!(ns.g_bound < 1.0, "{}", ns.g_bound);
        // the new solution grows like e^{t^2/2}
        assert!(m.expo.roots[ns.k2].re > 0.0);
        assert!((m.expo.rho[ns.k2] + 0.5).norm() < 1e-12);
    }
}
