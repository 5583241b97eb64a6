use nalgebra::DMatrix;

use super::frame::Frame;
use super::gauge::{ExponentData, GaugeData};
use crate::error::{HsolvError, Result};
use crate::realization::CompanionMatrix;
use crate::scalar::C64;

/// The system for `v` with `u = S0 (I + alpha/t + delta/t^2) v`, which is
/// `v' = B v` with `B = diag(gamma t + beta + rho/t) + R`, `R = O(t^-2)`.
/// With `k` factored out (`v = e^{Phi_k} w`) it becomes the w-system.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub comp: CompanionMatrix,
    pub frame: Frame,
    pub gauge: GaugeData,
    pub expo: ExponentData,
    pub k: usize,
}

pub fn reduced_system(
    comp: &CompanionMatrix,
    frame: &Frame,
    expo: &ExponentData,
    gauge: &GaugeData,
    k: usize,
) -> Result<ReducedSystem> {
    if k >= frame.n() {
        return Err(HsolvError::InvalidArgument(format!("leading index {k} out of range")));
    }
    Ok(ReducedSystem { comp: comp.clone(), frame: frame.clone(), gauge: gauge.clone(), expo: expo.clone(), k })
}

impl ReducedSystem {
    pub fn n(&self) -> usize {
        self.frame.n()
    }

    fn e_mat(&self, t: C64) -> DMatrix<C64> {
        &self.gauge.alpha / t + &self.gauge.delta / (t * t)
    }

    /// `S(t) = S0(t)(I + E(t))`, the map `v -> u`.
    pub fn s(&self, t: C64) -> DMatrix<C64> {
        let n = self.n();
        self.frame.s0(t) * (DMatrix::identity(n, n) + self.e_mat(t))
    }

    /// Exact coefficient matrix of the v-system.
    pub fn b(&self, t: C64) -> Result<DMatrix<C64>> {
        let n = self.n();
        let one = C64::new(1.0, 0.0);
        // T^-1 A T = t * Atilde with last row -Q_j
        let mut at = DMatrix::zeros(n, n);
        for i in 0..n - 1 {
            at[(i, i + 1)] = one;
        }
        for j in 0..n {
            at[(n - 1, j)] = -self.comp.q(j, t)?;
        }
        let nmat = DMatrix::from_fn(n, n, |i, j| if i == j { C64::new(i as f64, 0.0) } else { C64::new(0.0, 0.0) });
        let v = &self.frame.s0_1;
        let vinv = &self.frame.s0_inv_1;
        let m = vinv * (at * t - nmat / t) * v;
        let ie = DMatrix::identity(n, n) + self.e_mat(t);
        let de = -&self.gauge.alpha / (t * t) - &self.gauge.delta * (2.0 / (t * t * t));
        let rhs = &m * &ie - de;
        ie.lu().solve(&rhs).ok_or_else(|| HsolvError::Singular(format!("I + E at t = {t}")))
    }

    pub fn lambda(&self, t: C64) -> Vec<C64> {
        (0..self.n()).map(|j| self.expo.dphi(j, t)).collect()
    }

    /// `B - diag(gamma t + beta + rho/t)`.
    pub fn remainder(&self, t: C64) -> Result<DMatrix<C64>> {
        let mut r = self.b(t)?;
        for (j, l) in self.lambda(t).into_iter().enumerate() {
            r[(j, j)] -= l;
        }
        Ok(r)
    }

    /// Diagonal of the w-system: `Phi_j' - Phi_k'`.
    pub fn lambda_tilde(&self, t: C64) -> Vec<C64> {
        let lk = self.expo.dphi(self.k, t);
        (0..self.n()).map(|j| self.expo.dphi(j, t) - lk).collect()
    }

    /// Full w-system matrix `B - Phi_k' I`.
    pub fn w_matrix(&self, t: C64) -> Result<DMatrix<C64>> {
        let mut b = self.b(t)?;
        let lk = self.expo.dphi(self.k, t);
        for j in 0..self.n() {
            b[(j, j)] -= lk;
        }
        Ok(b)
    }

    /// Checks that `Re(Phi_j - Phi_k)' >= 0` for all j on the sampled real
    /// interval, i.e. that k is the most recessive index there.
    pub fn check_recessive(&self, t_lo: f64, t_hi: f64) -> Result<()> {
        for s in 0..=64 {
            let t = C64::new(t_lo + (t_hi - t_lo) * s as f64 / 64.0, 0.0);
            for (j, d) in self.lambda_tilde(t).into_iter().enumerate() {
                if d.re < 0.0 {
                    return Err(HsolvError::Ordering(format!(
                        "index {} is more recessive than the leading index {} at t = {}",
                        j, self.k, t.re
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_operator;
    use crate::config::Tolerances;
    use crate::diagonalization::{build_frame, exponents, normalized, table_roots};
    use crate::realization::{coefficient_table, realize, Sign};

    fn system(text: &str, gamma: f64, k: usize) -> ReducedSystem {
        let r = realize(&parse_operator(text).unwrap(), Sign::Plus).unwrap();
        let table = coefficient_table(&r).unwrap();
        let t = normalized(&table);
        let roots = table_roots(&t, &Tolerances::default()).unwrap();
        let f = build_frame(&roots).unwrap();
        let ginv = C64::new(1.0 / gamma, 0.0);
        let (e, g) = exponents(&t, &f, ginv).unwrap();
        let comp = CompanionMatrix::new(&r, &table, ginv);
        reduced_system(&comp, &f, &e, &g, k).unwrap()
    }

    #[test]
    fn harmonic_lambda_tilde() {
        let s = system("-X^2 - Y^2", 3.0, 0);
        let t = C64::new(7.0, 0.0);
        let lt = s.lambda_tilde(t);
        assert_eq!(lt[0], C64::new(0.0, 0.0));
        assert!((lt[1] - C64::new(-14.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn remainder_is_second_order() {
        for text in ["-X^2 - Y^2", "-X^2 - Y^2 + (2+1i)*Y + X", "i*X^3 + 2*X^2*Y + i*X*Y^2 + 2*Y^3 + X^2 - Y + 2i"] {
            let s = system(text, 4.0, 0);
            let mut worst: f64 = 0.0;
            for t in [10.0, 20.0, 40.0, 100.0] {
                let r = s.remainder(C64::new(t, 0.0)).unwrap();
                worst = worst.max(r.norm() * t * t);
            }
            assert!(worst < 50.0, "{text}: {worst}");
        }
    }

    #[test]
    fn recessive_check() {
        let s = system("-X^2 - Y^2", 3.0, 1);
        assert!(s.check_recessive(5.0, 15.0).is_ok());
        let s = system("-X^2 - Y^2", 3.0, 0);
        assert!(s.check_recessive(5.0, 15.0).is_err());
    }
}
