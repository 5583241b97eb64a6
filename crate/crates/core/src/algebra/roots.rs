use std::cmp::Ordering;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::poly::{homogeneous_part, symbol_coefficients, Letter, NcPolynomial, NcWord};
use crate::config::Tolerances;
use crate::error::{HsolvError, Result};
use crate::scalar::{gauss, gauss_is_zero, Gauss, Scalar, C64};

const ABERTH_MAX_ITER: usize = 500;

fn horner(coeffs: &[C64], z: C64) -> (C64, C64) {
    // value and derivative, coefficients ascending
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn normalize_monic(coeffs: &[C64]) -> Result<Vec<C64>> {
    let lead = *coeffs.last().ok_or(HsolvError::DegreeTooLow(0))?;
    if lead.norm() == 0.0 {
        return Err(HsolvError::InvalidArgument("zero leading coefficient".into()));
    }
    Ok(coeffs.iter().map(|c| c / lead).collect())
}

/// Simultaneous Aberth-Ehrlich iteration on a polynomial with ascending
/// coefficients. Seeds lie on a circle of radius `1 + max |c_k|`.
pub fn aberth_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let c = normalize_monic(coeffs)?;
    let n = c.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let radius = 1.0 + c[..n].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut z: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(radius, 2.0 * PI * k as f64 / n as f64 + 0.4))
        .collect();
    // a root is frozen once |p(z)| is within the Horner rounding bound
    let abs_c: Vec<C64> = c.iter().map(|x| C64::new(x.norm(), 0.0)).collect();
    let mut frozen = vec![false; n];
    for _ in 0..ABERTH_MAX_ITER {
        for i in 0..n {
            if frozen[i] {
                continue;
            }
            let (p, dp) = horner(&c, z[i]);
            let bound = horner(&abs_c, C64::new(z[i].norm(), 0.0)).0.re;
            if p.norm() <= 4.0 * f64::EPSILON * bound {
                frozen[i] = true;
                continue;
            }
            let ratio = p / dp;
            let s: C64 = (0..n).filter(|&j| j != i).map(|j| C64::new(1.0, 0.0) / (z[i] - z[j])).sum();
            let w = ratio / (C64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                if w.norm() <= f64::EPSILON * z[i].norm() {
                    frozen[i] = true;
                }
            }
        }
        if frozen.iter().all(|&f| f) {
            break;
        }
    }
    if !frozen.iter().all(|&f| f) {
        return Err(HsolvError::RootsNotConverged(ABERTH_MAX_ITER));
    }
    // Newton polish
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(&c, *zi);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if step.is_finite() {
                *zi -= step;
            }
        }
    }
    Ok(z)
}

/// Eigenvalues of the companion matrix (complex Schur form).
pub fn companion_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let c = normalize_monic(coeffs)?;
    let n = c.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut m = DMatrix::<C64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -c[i];
    }
    let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 100_000)
        .ok_or(HsolvError::RootsNotConverged(100_000))?;
    let ev = schur.eigenvalues().ok_or(HsolvError::RootsNotConverged(0))?;
    Ok(ev.iter().copied().collect())
}

/// Maximal relative mismatch between two root sets after nearest matching.
pub fn root_set_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("sizes agree");
        used[k] = true;
        worst = worst.max(d / x.norm().max(1.0));
    }
    worst
}

pub fn min_pairwise_gap(roots: &[C64]) -> f64 {
    let mut g = f64::INFINITY;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            g = g.min((roots[i] - roots[j]).norm());
        }
    }
    g
}

/// Roots of a polynomial (ascending coefficients) by two independent methods.
pub fn cross_validated_roots(coeffs: &[C64], tol: f64) -> Result<Vec<C64>> {
    let a = aberth_roots(coeffs)?;
    let b = companion_roots(coeffs)?;
    let d = root_set_distance(&a, &b);
    if d > tol {
        return Err(HsolvError::RootsDisagree(d));
    }
    Ok(a)
}

/// The n roots of `z -> P_n(iz, 1)`, cross-validated and ordered.
pub fn characteristic_roots(p_n: &NcPolynomial, tol: &Tolerances) -> Result<Vec<C64>> {
    let coeffs: Vec<C64> = symbol_coefficients(p_n, &gauss(1, 0)).iter().map(Scalar::to_c64).collect();
    let roots = cross_validated_roots(&coeffs, tol.root_agreement)?;
    let gap = min_pairwise_gap(&roots);
    if gap <= tol.root_gap {
        return Err(HsolvError::RepeatedRoots(gap));
    }
    Ok(order_roots(&roots)?.0)
}

fn root_cmp(a: &C64, b: &C64) -> Ordering {
    b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im))
}

/// Sorts by descending real part, ties broken by descending imaginary part.
/// Returns the sorted roots and `perm` with `sorted[k] = roots[perm[k]]`.
pub fn order_roots(roots: &[C64]) -> Result<(Vec<C64>, Vec<usize>)> {
    let mut perm: Vec<usize> = (0..roots.len()).collect();
    perm.sort_by(|&i, &j| root_cmp(&roots[i], &roots[j]));
    let sorted: Vec<C64> = perm.iter().map(|&k| roots[k]).collect();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(HsolvError::RepeatedRoots(0.0));
        }
    }
    Ok((sorted, perm))
}

/// Checks the pairwise ordering predicates on a sequence.
pub fn is_ordered(roots: &[C64]) -> bool {
    for j in 0..roots.len() {
        for l in j + 1..roots.len() {
            let d = roots[j] - roots[l];
            if d.re < 0.0 || (d.re == 0.0 && d.im <= 0.0) {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenericityReport {
    pub is_generic: bool,
    pub degree: usize,
    pub monic_defect: [f64; 2],
    pub min_root_gap: f64,
    pub roots: Vec<[f64; 2]>,
    pub reasons: Vec<String>,
}

impl GenericityReport {
    pub fn roots_c64(&self) -> Vec<C64> {
        self.roots.iter().map(|r| C64::new(r[0], r[1])).collect()
    }
}

/// Top-grade genericity: `P_n(iz,0) = z^n` and distinct roots of `P_n(iz,1)`.
pub fn check_generic(p: &NcPolynomial, tol: &Tolerances) -> Result<GenericityReport> {
    let n = p.degree();
    if n < 2 {
        return Err(HsolvError::DegreeTooLow(n));
    }
    let p_n = homogeneous_part(p, n)?;
    let mut reasons = Vec::new();
    // only the word X^n contributes to P_n(iz, 0)
    let xn = NcWord(vec![Letter::X; n]);
    let lead = p_n.coeff(&xn) * crate::scalar::i_pow::<Gauss>(n);
    let defect = (lead.clone() - gauss(1, 0)).to_c64();
    let monic_ok = defect.norm() <= tol.monic_defect;
    if !monic_ok {
        reasons.push(format!("P_n(iz,0) = ({}{:+}i) z^n, not z^n", lead.to_c64().re, lead.to_c64().im));
    }
    let mut roots = Vec::new();
    let mut gap = 0.0;
    if !gauss_is_zero(&lead) {
        let coeffs: Vec<C64> = symbol_coefficients(&p_n, &gauss(1, 0)).iter().map(Scalar::to_c64).collect();
        roots = cross_validated_roots(&coeffs, tol.root_agreement)?;
        roots = order_roots(&roots)
            .map(|r| r.0)
            .unwrap_or(roots);
        gap = min_pairwise_gap(&roots);
        if gap <= tol.root_gap {
            reasons.push(format!("characteristic roots not distinct (gap {gap:e})"));
        }
    } else {
        reasons.push("top-grade symbol has no z^n term".into());
    }
    let is_generic = monic_ok && !roots.is_empty() && gap > tol.root_gap;
    Ok(GenericityReport {
        is_generic,
        degree: n,
        monic_defect: [defect.re, defect.im],
        min_root_gap: gap,
        roots: roots.iter().map(|z| [z.re, z.im]).collect(),
        reasons,
    })
}
