use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::frame::Frame;
use crate::algebra::{cross_validated_roots, min_pairwise_gap, order_roots};
use crate::config::Tolerances;
use crate::error::{HsolvError, Result};
use crate::realization::CoeffTable;
use crate::scalar::{Scalar, C64};

/// Root-gap floor below which gauge solves refuse to divide.
pub const GAP_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct ErrorBlocks {
    pub a: Vec<C64>,
    pub b: Vec<C64>,
    /// constant part of `S0^-1 E1 S0`
    pub d1: DMatrix<C64>,
    /// coefficient of `1/t` in `S0^-1 E2 S0`
    pub d2: DMatrix<C64>,
}

#[derive(Debug, Clone)]
pub struct GaugeData {
    pub alpha: DMatrix<C64>,
    pub delta: DMatrix<C64>,
    pub d1: DMatrix<C64>,
    pub d2: DMatrix<C64>,
    /// `t S0^-1 S0'`
    pub k: DMatrix<C64>,
    /// right side of the second commutator equation
    pub rhs2: DMatrix<C64>,
}

/// Per-root asymptotic data at one parameter value.
#[derive(Debug, Clone)]
pub struct ExponentData {
    pub roots: Vec<C64>,
    pub beta: Vec<C64>,
    pub rho: Vec<C64>,
    /// `rho` in the gamma -> infinity limit (beta tends to 0)
    pub rho_inf: Vec<C64>,
    pub ginv: C64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentRecord {
    pub j: usize,
    pub gamma: [f64; 2],
    pub beta: [f64; 2],
    pub rho: [f64; 2],
    pub gamma_param: [f64; 2],
}

/// Divides by `d_{n,n}` so the top symbol is monic.
pub fn normalized<S: Scalar>(table: &CoeffTable<S>) -> CoeffTable<C64> {
    let t = table.to_c64();
    let lead = t.d_c64(t.n, t.n);
    let lead = if lead.norm() == 0.0 { C64::new(1.0, 0.0) } else { lead };
    CoeffTable {
        n: t.n,
        d: t.d.into_iter().map(|(k, v)| (k, v / lead)).collect(),
        e: t.e.into_iter().map(|(k, v)| (k, v / lead)).collect(),
    }
}

/// Ordered roots of `sum_j d_{n,j} z^j`, the eigenvalues of `A0(1)`.
pub fn table_roots<S: Scalar>(table: &CoeffTable<S>, tol: &Tolerances) -> Result<Vec<C64>> {
    let t = normalized(table);
    let coeffs: Vec<C64> = (0..=t.n).map(|j| t.d_c64(t.n, j)).collect();
    let roots = cross_validated_roots(&coeffs, tol.root_agreement)?;
    let gap = min_pairwise_gap(&roots);
    if gap <= tol.root_gap {
        return Err(HsolvError::RepeatedRoots(gap));
    }
    Ok(order_roots(&roots)?.0)
}

pub fn error_blocks(table: &CoeffTable<C64>, frame: &Frame, ginv: C64) -> ErrorBlocks {
    let n = frame.n();
    let a = table.a_coeffs(ginv);
    let b = table.b_coeffs(ginv);
    let poly_at = |c: &[C64], z: C64| -> C64 { c.iter().rev().fold(C64::new(0.0, 0.0), |acc, x| acc * z + x) };
    let d1 = DMatrix::from_fn(n, n, |i, j| frame.s0_inv_1[(i, n - 1)] * poly_at(&a, frame.roots[j]));
    let d2 = DMatrix::from_fn(n, n, |i, j| frame.s0_inv_1[(i, n - 1)] * poly_at(&b, frame.roots[j]));
    ErrorBlocks { a, b, d1, d2 }
}

fn commutator(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a * b - b * a
}

/// `[M, diag(gamma)]_{ij} = M_{ij} (gamma_j - gamma_i)`.
pub fn comm_gamma(m: &DMatrix<C64>, roots: &[C64]) -> DMatrix<C64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * (roots[j] - roots[i]))
}

pub fn solve_gauge(frame: &Frame, d1: &DMatrix<C64>, d2: &DMatrix<C64>) -> Result<GaugeData> {
    let n = frame.n();
    let g = &frame.roots;
    let gap = min_pairwise_gap(g);
    if gap < GAP_FLOOR {
        return Err(HsolvError::RepeatedRoots(gap));
    }
    let off = |m: &DMatrix<C64>, i: usize, j: usize| if i == j { C64::new(0.0, 0.0) } else { m[(i, j)] / (g[j] - g[i]) };
    let alpha = DMatrix::from_fn(n, n, |i, j| off(d1, i, j));
    let k = frame.k_matrix();
    let c = comm_gamma(&alpha, g);
    let rhs2 = d2 + commutator(d1, &alpha) + &alpha * &c - &k;
    let delta = DMatrix::from_fn(n, n, |i, j| off(&rhs2, i, j));
    Ok(GaugeData { alpha, delta, d1: d1.clone(), d2: d2.clone(), k, rhs2 })
}

impl GaugeData {
    /// Largest off-diagonal residual of the two commutator equations.
    pub fn residuals(&self, roots: &[C64]) -> (f64, f64) {
        let r1 = comm_gamma(&self.alpha, roots) - &self.d1;
        let r2 = comm_gamma(&self.delta, roots) - &self.rhs2;
        let offmax = |m: &DMatrix<C64>| {
            let mut v: f64 = 0.0;
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    if i != j {
                        v = v.max(m[(i, j)].norm());
                    }
                }
            }
            v
        };
        (offmax(&r1), offmax(&r2))
    }
}

/// Gauge and exponents for a monic table at `ginv = 1/gamma`.
pub fn exponents(table: &CoeffTable<C64>, frame: &Frame, ginv: C64) -> Result<(ExponentData, GaugeData)> {
    let eb = error_blocks(table, frame, ginv);
    let gauge = solve_gauge(frame, &eb.d1, &eb.d2)?;
    let n = frame.n();
    let beta = (0..n).map(|j| gauge.d1[(j, j)]).collect();
    let rho = (0..n).map(|j| gauge.rhs2[(j, j)]).collect();
    let eb_inf = error_blocks(table, frame, C64::new(0.0, 0.0));
    let g_inf = solve_gauge(frame, &eb_inf.d1, &eb_inf.d2)?;
    let rho_inf = (0..n).map(|j| g_inf.rhs2[(j, j)]).collect();
    Ok((ExponentData { roots: frame.roots.clone(), beta, rho, rho_inf, ginv }, gauge))
}

/// `ln|t|` on the real axis, principal branch elsewhere.
pub fn log_t(t: C64) -> C64 {
    if t.im == 0.0 {
        C64::new(t.re.abs().ln(), 0.0)
    } else {
        t.ln()
    }
}

impl ExponentData {
    pub fn n(&self) -> usize {
        self.roots.len()
    }

    /// `Phi_j = gamma_j t^2/2 + beta_j t + rho_j ln|t|`.
    pub fn phi(&self, j: usize, t: C64) -> C64 {
        self.roots[j] * t * t / 2.0 + self.beta[j] * t + self.rho[j] * log_t(t)
    }

    pub fn dphi(&self, j: usize, t: C64) -> C64 {
        self.roots[j] * t + self.beta[j] + self.rho[j] / t
    }

    pub fn gamma_param(&self) -> C64 {
        if self.ginv.norm() == 0.0 {
            C64::new(f64::INFINITY, 0.0)
        } else {
            C64::new(1.0, 0.0) / self.ginv
        }
    }

    pub fn records(&self) -> Vec<ExponentRecord> {
        let g = self.gamma_param();
        (0..self.n())
            .map(|j| ExponentRecord {
                j: j + 1,
                gamma: [self.roots[j].re, self.roots[j].im],
                beta: [self.beta[j].re, self.beta[j].im],
                rho: [self.rho[j].re, self.rho[j].im],
                gamma_param: [g.re, g.im],
            })
            .collect()
    }
}
