//! The invariant suite behind `hsolv verify`, plus constructors used by tests.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    aberth_roots, check_generic, companion_roots, is_ordered, root_set_distance, symbol_coefficients, homogeneous_part,
    Letter, NcPolynomial, NcWord,
};
use crate::config::Config;
use crate::diagonalization::{build_frame, exponents, normalized, table_roots, Frame};
use crate::error::{HsolvError, Result};
use crate::numerics::{abel_check, adjoint_kernel_basis, canonical_basis, wronskians, OdeModel};
use crate::realization::{coefficient_table, realize, Sign};
use crate::scalar::{gauss_from_c64, Scalar, C64};
use crate::verdict::{estimate_report, integral_bound_harness, HarnessReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub limit: f64,
    pub detail: String,
}

impl Check {
    /// Passes when `value <= limit`.
    pub fn at_most(name: &str, value: f64, limit: f64, detail: impl Into<String>) -> Self {
        Check { name: name.into(), pass: value <= limit, value, limit, detail: detail.into() }
    }

    pub fn flag(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), pass, value: if pass { 1.0 } else { 0.0 }, limit: 1.0, detail: detail.into() }
    }

    fn failed(name: &str, e: &HsolvError) -> Self {
        Check { name: name.into(), pass: false, value: f64::NAN, limit: f64::NAN, detail: e.to_string() }
    }

    /// `log10(limit / value)`; positive means room to spare.
    pub fn margin(&self) -> f64 {
        if self.value == 0.0 {
            f64::INFINITY
        } else {
            (self.limit / self.value).log10()
        }
    }
}

/// Homogeneous `P_n` in commutative word order with `P_n(iz, 1) = prod (z - root)`.
/// Coefficients are rounded to dyadic rationals, so the roots are reproduced to roundoff.
pub fn operator_from_roots(roots: &[C64]) -> NcPolynomial {
    let n = roots.len();
    let mut c = vec![C64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![C64::new(0.0, 0.0); c.len() + 1];
        for (k, v) in c.iter().enumerate() {
            next[k + 1] += v;
            next[k] -= v * r;
        }
        c = next;
    }
    let mut p = NcPolynomial::zero();
    for (k, ck) in c.iter().enumerate() {
        // the word X^k Y^{n-k} contributes (iz)^k
        let coeff = ck * C64::new(0.0, -1.0).powu(k as u32);
        let mut letters = vec![Letter::X; k];
        letters.extend(std::iter::repeat(Letter::Y).take(n - k));
        p.add_term(NcWord(letters), gauss_from_c64(coeff).expect("finite coefficient"));
    }
    p
}

/// Companion matrix of the principal part with eigenvalues `root * t`.
pub fn principal_companion(roots: &[C64], t: C64) -> DMatrix<C64> {
    let n = roots.len();
    let mut c = vec![C64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![C64::new(0.0, 0.0); c.len() + 1];
        for (k, v) in c.iter().enumerate() {
            next[k + 1] += v;
            next[k] -= v * r * t;
        }
        c = next;
    }
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n - 1 {
        a[(i, i + 1)] = C64::new(1.0, 0.0);
    }
    for j in 0..n {
        a[(n - 1, j)] = -c[j];
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameErrors {
    /// `|A0 S0 - S0 Lambda0| / (|A0| |S0|)`
    pub intertwining: f64,
    /// `|det S0(t) - t^{n(n-1)/2} det S0(1)|` relative
    pub determinant: f64,
    /// `|S0(t)^{-1} S0(t) - I|` with the column-scaled inverse
    pub inverse: f64,
}

pub fn frame_errors(frame: &Frame, t: f64) -> FrameErrors {
    let n = frame.n();
    let tc = C64::new(t, 0.0);
    let s0 = frame.s0(tc);
    let a0 = principal_companion(&frame.roots, tc);
    let lhs = &a0 * &s0;
    let rhs = &s0 * frame.lambda0(tc);
    let intertwining = (lhs - rhs).norm() / (a0.norm() * s0.norm());
    let det_num = s0.clone().determinant();
    let det_law = frame.det_s0(tc);
    let determinant = (det_num - det_law).norm() / det_law.norm();
    let inverse = (frame.s0_inv(tc) * &s0 - DMatrix::identity(n, n)).norm();
    FrameErrors { intertwining, determinant, inverse }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentLaws {
    /// max spread of `gamma * beta_j` across the sampled gammas
    pub gamma_beta_spread: f64,
    /// max relative defect of `rho_j` from an affine function of `1/gamma^2`
    pub rho_affine_defect: f64,
}

/// Checks the gamma dependence of the exponents at three or more real gammas.
pub fn exponent_laws(p: &NcPolynomial, sign: Sign, gammas: &[f64], cfg: &Config) -> Result<ExponentLaws> {
    if gammas.len() < 3 {
        return Err(HsolvError::InvalidArgument("exponent laws need three gammas".into()));
    }
    let r = realize(p, sign)?;
    let table = normalized(&coefficient_table(&r)?);
    let roots = table_roots(&table, &cfg.tol)?;
    let frame = build_frame(&roots)?;
    let data = gammas
        .iter()
        .map(|&g| exponents(&table, &frame, C64::new(1.0 / g, 0.0)).map(|e| e.0))
        .collect::<Result<Vec<_>>>()?;
    let n = roots.len();
    let mut spread: f64 = 0.0;
    let mut affine: f64 = 0.0;
    for j in 0..n {
        let gb: Vec<C64> = data.iter().zip(gammas).map(|(e, &g)| e.beta[j] * g).collect();
        let scale = gb.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for z in &gb {
            spread = spread.max((z - gb[0]).norm() / scale);
        }
        let x: Vec<f64> = gammas.iter().map(|g| 1.0 / (g * g)).collect();
        let slope = (data[1].rho[j] - data[0].rho[j]) / (x[1] - x[0]);
        let rscale = data.iter().map(|e| e.rho[j].norm()).fold(1.0, f64::max);
        for m in 2..data.len() {
            let pred = data[0].rho[j] + slope * (x[m] - x[0]);
            affine = affine.max((pred - data[m].rho[j]).norm() / rscale);
        }
    }
    Ok(ExponentLaws { gamma_beta_spread: spread, rho_affine_defect: affine })
}

/// Sup ratios of the Gaussian integral harness on the standard parameter grid.
pub fn harness_table(t_max: f64) -> Result<Vec<HarnessReport>> {
    let mut out = Vec::new();
    for gamma in [0.5, 1.0, 2.0] {
        for a in [0.0, 1.0, 2.0] {
            out.push(integral_bound_harness(gamma, 0.0, a, t_max, 4.0)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub harness: Vec<HarnessReport>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

const FRAME_TS: [f64; 4] = [0.5, 1.0, 2.0, 10.0];

/// Runs every invariant on one operator at one gamma.
pub fn verify_suite(p: &NcPolynomial, sign: Sign, gamma: C64, cfg: &Config, inject_misorder: bool) -> VerifyReport {
    let mut checks = Vec::new();
    let gen = match check_generic(p, &cfg.tol) {
        Ok(g) => g,
        Err(e) => {
            checks.push(Check::failed("genericity", &e));
            return VerifyReport { checks, harness: vec![] };
        }
    };
    checks.push(Check::flag("genericity", gen.is_generic, gen.reasons.join("; ")));
    if !gen.is_generic {
        return VerifyReport { checks, harness: vec![] };
    }
    let n = gen.degree;
    if let Ok(p_n) = homogeneous_part(p, n) {
        let coeffs: Vec<C64> = symbol_coefficients(&p_n, &crate::scalar::gauss(1, 0)).iter().map(Scalar::to_c64).collect();
        match (aberth_roots(&coeffs), companion_roots(&coeffs)) {
            (Ok(a), Ok(b)) => checks.push(Check::at_most(
                "root_cross_validation",
                root_set_distance(&a, &b),
                cfg.tol.root_agreement,
                "simultaneous iteration against companion eigenvalues",
            )),
            (Err(e), _) | (_, Err(e)) => checks.push(Check::failed("root_cross_validation", &e)),
        }
    }
    let mut roots = gen.roots_c64();
    if inject_misorder {
        roots.reverse();
    }
    checks.push(Check::flag("root_ordering", is_ordered(&roots), format!("{} roots", roots.len())));

    let model = match OdeModel::for_operator(p, sign, gamma, &cfg.tol) {
        Ok(m) => {
            checks.push(Check::at_most("coefficient_table_residual", 0.0, 0.0, "exact normal-ordering fit"));
            m
        }
        Err(e) => {
            checks.push(Check::failed("coefficient_table_residual", &e));
            return VerifyReport { checks, harness: vec![] };
        }
    };
    let (mut fi, mut fd, mut fv) = (0.0f64, 0.0f64, 0.0f64);
    for t in FRAME_TS {
        let e = frame_errors(&model.frame, t);
        fi = fi.max(e.intertwining);
        fd = fd.max(e.determinant);
        fv = fv.max(e.inverse);
    }
    checks.push(Check::at_most("frame_intertwining", fi, 1e-10, "A0 S0 = S0 Lambda0"));
    checks.push(Check::at_most("frame_determinant", fd, 1e-10, "det S0(t) = t^{n(n-1)/2} det S0(1)"));
    checks.push(Check::at_most("frame_inverse_scaling", fv, 1e-10, "column-scaled inverse"));
    let (r1, r2) = model.gauge.residuals(&model.frame.roots);
    checks.push(Check::at_most("gauge_first_order", r1, 1e-12, "off-diagonal of [alpha, Gamma] - D1"));
    checks.push(Check::at_most("gauge_second_order", r2, 1e-12, "off-diagonal of the delta equation"));
    match model.reduced(0).and_then(|s| Ok((s.remainder(C64::new(10.0, 0.0))?.norm(), s.remainder(C64::new(20.0, 0.0))?.norm()))) {
        Ok((a, b)) => {
            let ratio = if a < 1e-12 { 0.0 } else { b / a };
            checks.push(Check::at_most("remainder_second_order", ratio, 0.3, format!("|R(20)|/|R(10)|, |R(10)| = {a:e}")));
        }
        Err(e) => checks.push(Check::failed("remainder_second_order", &e)),
    }
    if gamma.im == 0.0 && gamma.re.is_finite() && gamma.re > 0.0 {
        let g = gamma.re;
        match exponent_laws(p, sign, &[g, 2.0 * g, 4.0 * g], cfg) {
            Ok(l) => {
                checks.push(Check::at_most("gamma_beta_constant", l.gamma_beta_spread, 1e-10, "gamma * beta_j"));
                checks.push(Check::at_most("rho_affine_in_inverse_square", l.rho_affine_defect, 1e-10, "rho_j vs 1/gamma^2"));
            }
            Err(e) => checks.push(Check::failed("exponent_laws", &e)),
        }
    }
    match canonical_basis(p, sign, gamma, &cfg.window, cfg) {
        Ok(b) => {
            match b.jet_residuals(1e-12) {
                Ok(r) => checks.push(Check::at_most("jet_residual", r.iter().copied().fold(0.0, f64::max), 1e-8, "relative propagation defect")),
                Err(e) => checks.push(Check::failed("jet_residual", &e)),
            }
            match wronskians(&b) {
                Ok(w) => {
                    match abel_check(&b, &w) {
                        Ok(a) => checks.push(Check::at_most("abel", a.max_defect, 1e-6, format!("log W slope {:.6}", a.slope))),
                        Err(e) => checks.push(Check::failed("abel", &e)),
                    }
                    match adjoint_kernel_basis(&b, &w) {
                        Ok(k) => checks.push(Check::at_most(
                            "adjoint_residual",
                            k.residuals.iter().copied().fold(0.0, f64::max),
                            1e-8,
                            "formal adjoint on conjugated quotients",
                        )),
                        Err(e) => checks.push(Check::failed("adjoint_residual", &e)),
                    }
                }
                Err(e) => checks.push(Check::failed("wronskian", &e)),
            }
        }
        Err(e) => checks.push(Check::failed("canonical_basis", &e)),
    }
    match estimate_report(&model, &cfg.window, cfg, true) {
        Ok(r) => checks.push(Check::flag("envelope_estimates", r.pass, format!("{} paths", r.paths.len()))),
        Err(e) => checks.push(Check::failed("envelope_estimates", &e)),
    }
    let harness = match (harness_table(30.0), harness_table(40.0)) {
        (Ok(h30), Ok(h40)) => {
            let finite = h40.iter().all(|h| h.finite());
            checks.push(Check::flag("integral_bounds_finite", finite, "sup ratios over the alpha sweep"));
            let cauchy = h30
                .iter()
                .zip(&h40)
                .map(|(a, b)| {
                    let g = (b.sweep_growth_sup / a.sweep_growth_sup - 1.0).abs();
                    let d = (b.sweep_decay_sup / a.sweep_decay_sup - 1.0).abs();
                    g.max(d)
                })
                .fold(0.0, f64::max);
            checks.push(Check::at_most("integral_bounds_cauchy", cauchy, 0.01, "t_max 30 against 40"));
            h40
        }
        (Err(e), _) | (_, Err(e)) => {
            checks.push(Check::failed("integral_bounds", &e));
            vec![]
        }
    };
    VerifyReport { checks, harness }
}
