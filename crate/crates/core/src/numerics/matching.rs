//! Matching of adjoint solutions that decay at both ends of the real line.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::basis::{check_window, sweep_options, BasisJet};
use super::model::{ginv_of, OdeModel};
use super::sweep::{qr_sweep, Path};
use crate::algebra::NcPolynomial;
use crate::config::{Config, GammaRange};
use crate::error::{HsolvError, Result};
use crate::realization::{realize, OdeRealization, Sign};
use crate::scalar::{Scalar, C64};

#[derive(Debug, Clone)]
pub struct MatchReport {
    /// adjoint solutions decaying at `+inf`
    pub p: usize,
    /// adjoint solutions decaying at `-inf`
    pub q: usize,
    /// orthonormal bases of both decaying subspaces at `t = 0`, side by side
    pub matrix: DMatrix<C64>,
    pub sigma_min: f64,
    pub gamma_param: C64,
}

/// Count of roots with real part below `-thr`; errors when a root is too close to the axis.
fn decaying_count(roots: &[C64], thr: f64) -> Result<usize> {
    if let Some(z) = roots.iter().find(|z| z.re.abs() <= thr) {
        return Err(HsolvError::InvalidArgument(format!("root {z} has real part within {thr:e} of zero")));
    }
    Ok(roots.iter().filter(|z| z.re < -thr).count())
}

/// `p` leading columns of the flag at `t = 0` obtained by sweeping in from `dir * infinity`.
fn decaying_frame(model: &OdeModel, dir: C64, p: usize, cfg: &Config) -> Result<DMatrix<C64>> {
    let path = Path { z0: C64::new(0.0, 0.0), dir };
    let s_match = cfg.window.t1;
    let s_far = cfg.far_factor * s_match;
    check_window(model, &path, s_match, s_far, cfg.tol.re_threshold)?;
    let sweep = qr_sweep(model, path, s_far, 0.0, &[], &sweep_options(cfg))?;
    Ok(sweep.anchor_q().columns(0, p).into_owned())
}

/// Smallest singular value of `[U+ | U-]`; zero when the column count exceeds `n`.
pub fn sigma_of(u_plus: &DMatrix<C64>, u_minus: &DMatrix<C64>) -> (DMatrix<C64>, f64) {
    let n = u_plus.nrows();
    let (p, q) = (u_plus.ncols(), u_minus.ncols());
    let mut m = DMatrix::zeros(n, p + q);
    m.columns_mut(0, p).copy_from(u_plus);
    m.columns_mut(p, q).copy_from(u_minus);
    let sigma = if p + q > n {
        0.0
    } else if p == 0 || q == 0 {
        1.0
    } else {
        m.clone().svd(false, false).singular_values.iter().copied().fold(f64::INFINITY, f64::min)
    };
    (m, sigma)
}

/// Matching test for the adjoint of a realization at `ginv`.
pub fn schwartz_match_realization<S: Scalar>(real: &OdeRealization<S>, ginv: C64, cfg: &Config) -> Result<MatchReport> {
    let gamma_param = if ginv.norm() == 0.0 { C64::new(f64::INFINITY, 0.0) } else { C64::new(1.0, 0.0) / ginv };
    let adj = OdeModel::new(&real.formal_adjoint(), ginv.conj(), &cfg.tol)?;
    let thr = cfg.tol.re_threshold;
    // on the real line e^{gamma t^2/2} decays at both ends exactly when Re gamma < 0
    let p = decaying_count(adj.roots(), thr)?;
    let q = p;
    let n = adj.n();
    let (u_plus, u_minus) = if p + q > n || p == 0 {
        (
            decaying_frame(&adj, C64::new(1.0, 0.0), p, cfg).unwrap_or_else(|_| DMatrix::zeros(n, p)),
            decaying_frame(&adj, C64::new(-1.0, 0.0), q, cfg).unwrap_or_else(|_| DMatrix::zeros(n, q)),
        )
    } else {
        (decaying_frame(&adj, C64::new(1.0, 0.0), p, cfg)?, decaying_frame(&adj, C64::new(-1.0, 0.0), q, cfg)?)
    };
    let (matrix, sigma_min) = sigma_of(&u_plus, &u_minus);
    Ok(MatchReport { p, q, matrix, sigma_min, gamma_param })
}

pub fn schwartz_match(p: &NcPolynomial, sign: Sign, gamma: C64, cfg: &Config) -> Result<MatchReport> {
    schwartz_match_realization(&realize(p, sign)?, ginv_of(gamma), cfg)
}

/// The same test for the top-grade operator alone (the `gamma = infinity` limit).
pub fn schwartz_match_top(p: &NcPolynomial, sign: Sign, cfg: &Config) -> Result<MatchReport> {
    schwartz_match_realization(&realize(p, sign)?.top_grade(), C64::new(0.0, 0.0), cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub gamma: f64,
    pub sigma_min: f64,
    pub p: usize,
    pub q: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub sign: String,
    pub rows: Vec<ScanRow>,
    /// sub-tolerance points confirmed below the refinement tolerance
    pub confirmed_dips: usize,
    /// the same count on the refined grid
    pub refined_dips: usize,
    pub limit_point_flag: bool,
}

fn sample(p: &NcPolynomial, sign: Sign, gammas: &[f64], cfg: &Config) -> Result<Vec<ScanRow>> {
    let real = realize(p, sign)?;
    gammas
        .par_iter()
        .map(|&g| {
            let m = schwartz_match_realization(&real, C64::new(1.0 / g, 0.0), cfg)?;
            Ok(ScanRow { gamma: g, sigma_min: m.sigma_min, p: m.p, q: m.q })
        })
        .collect()
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, target: f64, iters: usize) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut best = fc.min(fd);
    for _ in 0..iters {
        if best < target {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
        best = best.min(fc).min(fd);
    }
    best
}

fn confirmed_dips(p: &NcPolynomial, sign: Sign, rows: &[ScanRow], cfg: &Config) -> Result<usize> {
    let real = realize(p, sign)?;
    let tol = cfg.tol.sigma;
    let confirm = cfg.tol.sigma_confirm;
    let idx: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].sigma_min < tol).collect();
    let ok: Vec<bool> = idx
        .par_iter()
        .map(|&i| {
            if rows[i].sigma_min < confirm {
                return true;
            }
            let lo = rows[i.saturating_sub(1)].gamma;
            let hi = rows[(i + 1).min(rows.len() - 1)].gamma;
            let f = |g: f64| {
                schwartz_match_realization(&real, C64::new(1.0 / g, 0.0), cfg).map(|m| m.sigma_min).unwrap_or(f64::INFINITY)
            };
            golden_min(f, lo, hi, confirm, 40) < confirm
        })
        .collect();
    Ok(ok.into_iter().filter(|&b| b).count())
}

/// Samples `sigma_min` over real gamma; flags when confirmed dips multiply under refinement.
pub fn gamma_scan(p: &NcPolynomial, sign: Sign, range: &GammaRange, cfg: &Config) -> Result<ScanReport> {
    let rows = sample(p, sign, &range.points(), cfg)?;
    let confirmed = confirmed_dips(p, sign, &rows, cfg)?;
    let refined_dips = if confirmed == 0 {
        0
    } else {
        let fine = GammaRange::new(range.lo, range.hi, 2 * range.steps - 1)?;
        let fine_rows = sample(p, sign, &fine.points(), cfg)?;
        confirmed_dips(p, sign, &fine_rows, cfg)?
    };
    Ok(ScanReport {
        sign: sign.label().to_string(),
        rows,
        confirmed_dips: confirmed,
        refined_dips,
        limit_point_flag: refined_dips > confirmed,
    })
}

#[derive(Debug, Clone)]
pub struct TransitionReport {
    /// `psi^-_l = sum_k a[l,k] psi^+_k`
    pub a: DMatrix<C64>,
    /// relative residual of the jet identity at `t = 0`
    pub residual: f64,
}

/// Expresses the basis `minus` in terms of `plus` through their jets at `t = 0`.
pub fn transition_matrix(plus: &BasisJet, minus: &BasisJet) -> Result<TransitionReport> {
    let n = plus.n();
    if minus.n() != n {
        return Err(HsolvError::InvalidArgument("bases of different order".into()));
    }
    let mp = DMatrix::from_fn(n, n, |r, k| plus.anchor[k].mant[r]);
    let mm = DMatrix::from_fn(n, n, |r, k| minus.anchor[k].mant[r]);
    let x = mp.clone().lu().solve(&mm).ok_or_else(|| HsolvError::Singular("jet matrix at t = 0".into()))?;
    let a = DMatrix::from_fn(n, n, |l, k| x[(k, l)] * (minus.anchor[l].log_scale - plus.anchor[k].log_scale).exp());
    let defect = &mp * &x - &mm;
    let residual = defect.norm() / mm.norm();
    if !a.iter().all(|z| z.is_finite()) {
        return Err(HsolvError::Numerical("transition matrix overflows".into()));
    }
    Ok(TransitionReport { a, residual })
}

/// Entries below `rel` times the largest entry of their row count as zero.
pub fn block_pattern(a: &DMatrix<C64>, rel: f64) -> Vec<Vec<bool>> {
    (0..a.nrows())
        .map(|i| {
            let mx = (0..a.ncols()).map(|j| a[(i, j)].norm()).fold(0.0, f64::max);
            (0..a.ncols()).map(|j| a[(i, j)].norm() > rel * mx).collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegenerateRow {
    pub row: usize,
    /// fitted per-step decay factor of the leading entries
    pub ratio: f64,
    pub r2: f64,
    pub degenerate: bool,
}

/// Geometric-decay fit of `max_{k<p} |a[row,k]|` along a sequence of matrices.
pub fn degenerate_rows(seq: &[DMatrix<C64>], p: usize) -> Vec<DegenerateRow> {
    let Some(first) = seq.first() else { return vec![] };
    (0..first.nrows())
        .map(|row| {
            let ys: Vec<f64> = seq
                .iter()
                .map(|a| (0..p.min(a.ncols())).map(|k| a[(row, k)].norm()).fold(0.0, f64::max).max(1e-300).ln())
                .collect();
            let m = ys.len() as f64;
            let mx = (m - 1.0) / 2.0;
            let my = ys.iter().sum::<f64>() / m;
            let sxy: f64 = ys.iter().enumerate().map(|(i, y)| (i as f64 - mx) * (y - my)).sum();
            let sxx: f64 = (0..ys.len()).map(|i| (i as f64 - mx).powi(2)).sum();
            let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
            let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
            let r2 = if syy > 0.0 && sxx > 0.0 { sxy * sxy / (sxx * syy) } else { 0.0 };
            let ratio = slope.exp();
            DegenerateRow { row, ratio, r2, degenerate: ys.len() >= 3 && ratio < 0.5 && r2 > 0.9 }
        })
        .collect()
}
