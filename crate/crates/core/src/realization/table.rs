use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ode::{Mono, OdeRealization};
use crate::error::{HsolvError, Result};
use crate::scalar::{Scalar, C64};

/// Coefficients of the template
/// `P_l(i d, t) = sum_j t^{l-j} (d_{l,j} + sum_m e_{l,j,m} t^{-2m}) d^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTable<S: Scalar> {
    pub n: usize,
    pub d: BTreeMap<(usize, usize), S>,
    pub e: BTreeMap<(usize, usize, usize), S>,
}

/// One term `coeff / (gamma^gamma_power t^t_power)` of a remainder.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsTerm<S> {
    pub coeff: S,
    pub gamma_power: usize,
    pub t_power: usize,
}

/// `Q_j = d_{n,j} + first + second + eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QParts {
    pub d_n: C64,
    /// `d_{n-1,j} / (gamma t)`
    pub first: C64,
    /// `(e_{n,j,1} + d_{n-2,j}/gamma^2) / t^2`
    pub second: C64,
    pub eps: C64,
}

impl QParts {
    pub fn total(&self) -> C64 {
        self.d_n + self.first + self.second + self.eps
    }
}

pub fn coefficient_table<S: Scalar>(r: &OdeRealization<S>) -> Result<CoeffTable<S>> {
    let mut d = BTreeMap::new();
    let mut e = BTreeMap::new();
    for (k, c) in &r.monomials {
        let Mono { l, a, b } = *k;
        if b > l || a + b > l || (l - a - b) % 2 == 1 {
            return Err(HsolvError::TableResidual { l, a, b });
        }
        let m = (l - a - b) / 2;
        if m == 0 {
            d.insert((l, b), c.clone());
        } else {
            e.insert((l, b, m), c.clone());
        }
    }
    Ok(CoeffTable { n: r.n, d, e })
}

impl<S: Scalar> CoeffTable<S> {
    pub fn d(&self, l: usize, j: usize) -> S {
        self.d.get(&(l, j)).cloned().unwrap_or_else(S::zero)
    }

    pub fn e(&self, l: usize, j: usize, m: usize) -> S {
        self.e.get(&(l, j, m)).cloned().unwrap_or_else(S::zero)
    }

    pub fn d_c64(&self, l: usize, j: usize) -> C64 {
        self.d(l, j).to_c64()
    }

    pub fn e_c64(&self, l: usize, j: usize, m: usize) -> C64 {
        self.e(l, j, m).to_c64()
    }

    pub fn to_c64(&self) -> CoeffTable<C64> {
        CoeffTable {
            n: self.n,
            d: self.d.iter().map(|(k, v)| (*k, v.to_c64())).collect(),
            e: self.e.iter().map(|(k, v)| (*k, v.to_c64())).collect(),
        }
    }

    /// Rebuilds the normal-ordered monomials.
    pub fn to_realization(&self, sign: super::ode::Sign) -> OdeRealization<S> {
        let mut monomials = BTreeMap::new();
        for (&(l, j), c) in &self.d {
            monomials.insert(Mono { l, a: l - j, b: j }, c.clone());
        }
        for (&(l, j, m), c) in &self.e {
            monomials.insert(Mono { l, a: l - j - 2 * m, b: j }, c.clone());
        }
        OdeRealization { n: self.n, sign, monomials }
    }

    /// Terms of `Q_j` beyond order `t^-2`.
    pub fn eps(&self, j: usize) -> Vec<EpsTerm<S>> {
        let n = self.n;
        let mut out = Vec::new();
        let mut push = |l: usize, m: usize, c: &S| {
            let explicit = (l == n && m <= 1) || (l + 1 == n && m == 0) || (l + 2 == n && m == 0);
            if !explicit {
                out.push(EpsTerm { coeff: c.clone(), gamma_power: n - l, t_power: n - l + 2 * m });
            }
        };
        for (&(l, jj), c) in &self.d {
            if jj == j {
                push(l, 0, c);
            }
        }
        for (&(l, jj, m), c) in &self.e {
            if jj == j {
                push(l, m, c);
            }
        }
        out
    }

    /// Decomposition of `Q_j(t, gamma)` with `ginv = 1/gamma`.
    pub fn q_parts(&self, j: usize, t: C64, ginv: C64) -> Result<QParts> {
        if t.norm() == 0.0 {
            return Err(HsolvError::ZeroT);
        }
        let n = self.n;
        let d_n = self.d_c64(n, j);
        let first = if n >= 1 { self.d_c64(n - 1, j) * ginv / t } else { C64::new(0.0, 0.0) };
        let d2 = if n >= 2 { self.d_c64(n - 2, j) } else { C64::new(0.0, 0.0) };
        let second = (self.e_c64(n, j, 1) + d2 * ginv * ginv) / (t * t);
        let eps = self
            .eps(j)
            .iter()
            .map(|term| term.coeff.to_c64() * ginv.powu(term.gamma_power as u32) / t.powu(term.t_power as u32))
            .sum();
        Ok(QParts { d_n, first, second, eps })
    }

    /// `a_k = -d_{n-1,k}/gamma`, 0-based derivative index.
    pub fn a_coeffs(&self, ginv: C64) -> Vec<C64> {
        (0..self.n).map(|j| -self.d_c64(self.n - 1, j) * ginv).collect()
    }

    /// `b_k = -(e_{n,k,1} + d_{n-2,k}/gamma^2)`, 0-based derivative index.
    pub fn b_coeffs(&self, ginv: C64) -> Vec<C64> {
        let lower = |j| self.n.checked_sub(2).map_or(C64::new(0.0, 0.0), |l| self.d_c64(l, j));
        (0..self.n).map(|j| -(self.e_c64(self.n, j, 1) + lower(j) * ginv * ginv)).collect()
    }
}

/// `Q_j(t, gamma) = sum_l (gamma t)^{-(n-l)} q_{l,j}(t)`.
pub fn eval_q<S: Scalar>(table: &CoeffTable<S>, j: usize, t: C64, ginv: C64) -> Result<C64> {
    if t.norm() == 0.0 {
        return Err(HsolvError::ZeroT);
    }
    let n = table.n;
    let gt = ginv / t;
    let mut q = C64::new(0.0, 0.0);
    for (&(l, jj), c) in &table.d {
        if jj == j {
            q += c.to_c64() * gt.powu((n - l) as u32);
        }
    }
    for (&(l, jj, m), c) in &table.e {
        if jj == j {
            q += c.to_c64() * gt.powu((n - l) as u32) / t.powu(2 * m as u32);
        }
    }
    Ok(q)
}
