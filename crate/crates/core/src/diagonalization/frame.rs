use nalgebra::DMatrix;

use crate::error::{HsolvError, Result};
use crate::scalar::C64;

/// `S0(t) = diag(t^i) V` with `V_{ij} = gamma_j^i`; columns are eigenvectors of `A0(t)`.
#[derive(Debug, Clone)]
pub struct Frame {
    pub roots: Vec<C64>,
    pub s0_1: DMatrix<C64>,
    pub s0_inv_1: DMatrix<C64>,
}

pub fn build_frame(roots: &[C64]) -> Result<Frame> {
    let n = roots.len();
    if n == 0 {
        return Err(HsolvError::InvalidArgument("empty root set".into()));
    }
    let v = DMatrix::from_fn(n, n, |i, j| roots[j].powu(i as u32));
    let vinv = v
        .clone()
        .try_inverse()
        .ok_or_else(|| HsolvError::Singular("Vandermonde frame at t = 1".into()))?;
    Ok(Frame { roots: roots.to_vec(), s0_1: v, s0_inv_1: vinv })
}

impl Frame {
    pub fn n(&self) -> usize {
        self.roots.len()
    }

    pub fn s0(&self, t: C64) -> DMatrix<C64> {
        DMatrix::from_fn(self.n(), self.n(), |i, j| t.powu(i as u32) * self.s0_1[(i, j)])
    }

    /// `[S0(t)^-1]_{ij} = t^{-j} [S0(1)^-1]_{ij}` (0-based).
    pub fn s0_inv(&self, t: C64) -> DMatrix<C64> {
        DMatrix::from_fn(self.n(), self.n(), |i, j| self.s0_inv_1[(i, j)] / t.powu(j as u32))
    }

    pub fn lambda0(&self, t: C64) -> DMatrix<C64> {
        DMatrix::from_fn(self.n(), self.n(), |i, j| if i == j { self.roots[i] * t } else { C64::new(0.0, 0.0) })
    }

    pub fn det_s0_1(&self) -> C64 {
        let mut d = C64::new(1.0, 0.0);
        for i in 0..self.n() {
            for j in i + 1..self.n() {
                d *= self.roots[j] - self.roots[i];
            }
        }
        d
    }

    pub fn det_s0(&self, t: C64) -> C64 {
        let n = self.n() as u32;
        t.powu(n * (n - 1) / 2) * self.det_s0_1()
    }

    /// `K = t S0^-1 S0'`, constant: `K_{ij} = sum_k [S0(1)^-1]_{ik} k gamma_j^k`.
    pub fn k_matrix(&self) -> DMatrix<C64> {
        let n = self.n();
        DMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| self.s0_inv_1[(i, k)] * k as f64 * self.roots[j].powu(k as u32)).sum()
        })
    }
}
