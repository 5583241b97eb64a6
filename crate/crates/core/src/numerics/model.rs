use nalgebra::DMatrix;

use crate::algebra::NcPolynomial;
use crate::config::Tolerances;
use crate::diagonalization::{
    build_frame, exponents, normalized, reduced_system, table_roots, ExponentData, Frame, GaugeData, ReducedSystem,
};
use crate::error::{HsolvError, Result};
use crate::realization::{coefficient_table, realize, CoeffTable, CompanionMatrix, OdeRealization, Sign};
use crate::scalar::{Scalar, C64};

/// `1/gamma`, with infinity mapped to 0.
pub fn ginv_of(gamma: C64) -> C64 {
    if !gamma.re.is_finite() || !gamma.im.is_finite() {
        C64::new(0.0, 0.0)
    } else {
        C64::new(1.0, 0.0) / gamma
    }
}

/// A realized operator at one parameter value with its asymptotic frame.
#[derive(Debug, Clone)]
pub struct OdeModel {
    /// monic realization
    pub real: OdeRealization<C64>,
    pub table: CoeffTable<C64>,
    pub comp: CompanionMatrix,
    pub frame: Frame,
    pub expo: ExponentData,
    pub gauge: GaugeData,
    pub ginv: C64,
}

impl OdeModel {
    pub fn new<S: Scalar>(real: &OdeRealization<S>, ginv: C64, tol: &Tolerances) -> Result<Self> {
        if real.n < 2 {
            return Err(HsolvError::DegreeTooLow(real.n));
        }
        let table = coefficient_table(real)?;
        let ntable = normalized(&table);
        let roots = table_roots(&ntable, tol)?;
        let frame = build_frame(&roots)?;
        let (expo, gauge) = exponents(&ntable, &frame, ginv)?;
        let comp = CompanionMatrix::new(real, &table, ginv);
        let real_c = real.to_c64();
        let lead = ntable_lead(&table.to_c64());
        let real = OdeRealization {
            n: real_c.n,
            sign: real_c.sign,
            monomials: real_c.monomials.into_iter().map(|(k, c)| (k, c / lead)).collect(),
        };
        Ok(OdeModel { real, table: ntable, comp, frame, expo, gauge, ginv })
    }

    pub fn for_operator(p: &NcPolynomial, sign: Sign, gamma: C64, tol: &Tolerances) -> Result<Self> {
        OdeModel::new(&realize(p, sign)?, ginv_of(gamma), tol)
    }

    /// Model of the formal adjoint at `conj(gamma)`.
    pub fn adjoint_of<S: Scalar>(real: &OdeRealization<S>, gamma: C64, tol: &Tolerances) -> Result<Self> {
        OdeModel::new(&real.formal_adjoint(), ginv_of(gamma).conj(), tol)
    }

    pub fn n(&self) -> usize {
        self.frame.n()
    }

    pub fn roots(&self) -> &[C64] {
        &self.frame.roots
    }

    /// Levinson frame `S(t) = S0(t)(I + alpha/t + delta/t^2)`.
    pub fn seed(&self, t: C64) -> DMatrix<C64> {
        let n = self.n();
        let e = &self.gauge.alpha / t + &self.gauge.delta / (t * t);
        self.frame.s0(t) * (DMatrix::identity(n, n) + e)
    }

    pub fn reduced(&self, k: usize) -> Result<ReducedSystem> {
        reduced_system(&self.comp, &self.frame, &self.expo, &self.gauge, k)
    }
}

fn ntable_lead(t: &CoeffTable<C64>) -> C64 {
    let l = t.d_c64(t.n, t.n);
    if l.norm() == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        l
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_operator;

    #[test]
    fn adjoint_roots_are_reflected_conjugates() {
        let p = parse_operator("-X^2 + 3i*X*Y + 2*Y^2 + (1+2i)*Y").unwrap();
        let tol = Tolerances::default();
        let r = realize(&p, Sign::Plus).unwrap();
        let gamma = C64::new(3.0, 1.0);
        let m = OdeModel::new(&r, ginv_of(gamma), &tol).unwrap();
        let a = OdeModel::adjoint_of(&r, gamma, &tol).unwrap();
        for g in m.roots() {
            let want = -g.conj();
            assert!(a.roots().iter().any(|z| (z - want).norm() < 1e-12));
        }
        assert!((a.real.leading() - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn seed_columns_solve_principal_system_asymptotically() {
        let p = parse_operator("-X^2 - Y^2").unwrap();
        let m = OdeModel::for_operator(&p, Sign::Plus, C64::new(2.0, 0.0), &Tolerances::default()).unwrap();
        let t = C64::new(10.0, 0.0);
        let s = m.seed(t);
        // first row of S0 is all ones
        assert!((s[(0, 0)] - C64::new(1.0, 0.0)).norm() < 0.05);
    }
}
