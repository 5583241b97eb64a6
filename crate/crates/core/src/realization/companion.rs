use nalgebra::DMatrix;

use super::ode::{eval_poly, OdeRealization};
use super::table::{eval_q, CoeffTable};
use crate::error::Result;
use crate::scalar::{Scalar, C64};

/// First-order system `u' = A(t, gamma) u` for `u = (f, f', ..., f^(n-1))`.
#[derive(Debug, Clone)]
pub struct CompanionMatrix {
    pub n: usize,
    pub ginv: C64,
    /// `polys[j][a]`: coefficient of `t^a` in `c_j(t) = t^{n-j} Q_j`.
    pub polys: Vec<Vec<C64>>,
    /// `d_{n,j}`, the constants of the principal part.
    pub d_top: Vec<C64>,
    table: CoeffTable<C64>,
}

impl CompanionMatrix {
    /// Builds the system at `ginv = 1/gamma`. The operator is divided by its
    /// constant leading coefficient so the last row is `-c_j(t)`.
    pub fn new<S: Scalar>(r: &OdeRealization<S>, table: &CoeffTable<S>, ginv: C64) -> Self {
        let n = r.n;
        let mut polys = r.coeff_polys(ginv);
        let lead = polys[n].first().copied().unwrap_or(C64::new(1.0, 0.0));
        polys.truncate(n);
        for p in polys.iter_mut() {
            for c in p.iter_mut() {
                *c /= lead;
            }
        }
        let table = table.to_c64();
        let table = CoeffTable {
            n,
            d: table.d.into_iter().map(|(k, v)| (k, v / lead)).collect(),
            e: table.e.into_iter().map(|(k, v)| (k, v / lead)).collect(),
        };
        let d_top = (0..n).map(|j| table.d_c64(n, j)).collect();
        CompanionMatrix { n, ginv, polys, d_top, table }
    }

    pub fn from_table<S: Scalar>(table: &CoeffTable<S>, sign: super::Sign, ginv: C64) -> Self {
        Self::new(&table.to_realization(sign), table, ginv)
    }

    pub fn table(&self) -> &CoeffTable<C64> {
        &self.table
    }

    pub fn c(&self, j: usize, t: C64) -> C64 {
        eval_poly(&self.polys[j], t)
    }

    pub fn a(&self, t: C64) -> DMatrix<C64> {
        let n = self.n;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n - 1 {
            m[(i, i + 1)] = C64::new(1.0, 0.0);
        }
        for j in 0..n {
            m[(n - 1, j)] = -self.c(j, t);
        }
        m
    }

    /// Principal part: last row `-d_{n,j} t^{n-j}`.
    pub fn a0(&self, t: C64) -> DMatrix<C64> {
        let n = self.n;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n - 1 {
            m[(i, i + 1)] = C64::new(1.0, 0.0);
        }
        for j in 0..n {
            m[(n - 1, j)] = -self.d_top[j] * t.powu((n - j) as u32);
        }
        m
    }

    pub fn q(&self, j: usize, t: C64) -> Result<C64> {
        eval_q(&self.table, j, t, self.ginv)
    }

    pub fn trace(&self, t: C64) -> C64 {
        -self.c(self.n - 1, t)
    }

    /// `out = A(t) u` without forming the matrix.
    pub fn apply(&self, t: C64, u: &[C64], out: &mut [C64]) {
        let n = self.n;
        for i in 0..n - 1 {
            out[i] = u[i + 1];
        }
        let mut last = C64::new(0.0, 0.0);
        for j in 0..n {
            last -= self.c(j, t) * u[j];
        }
        out[n - 1] = last;
    }
}
