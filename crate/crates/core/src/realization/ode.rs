use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{homogeneous_part, Letter, NcPolynomial};
use crate::error::Result;
use crate::scalar::{binomial, falling, i_pow, Gauss, Scalar, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

/// Key of a realized monomial: grade `l`, power `a` of t, derivative order `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Mono {
    pub l: usize,
    pub a: usize,
    pub b: usize,
}

/// Normal-ordered operator `sum_l gamma^-(n-l) sum c_{l,a,b} t^a d^b`.
///
/// The scalar `(-i gamma)^n` relating this to the unnormalized representation
/// is recorded by [`OdeRealization::prefactor`] rather than multiplied in.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeRealization<S: Scalar = Gauss> {
    pub n: usize,
    pub sign: Sign,
    pub monomials: BTreeMap<Mono, S>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonomialRecord {
    pub t_power: usize,
    pub d_order: usize,
    pub coeff: [f64; 2],
    pub grade: usize,
}

/// Normal-ordered Weyl element: (a, b) -> coefficient of t^a d^b.
type Weyl<S> = BTreeMap<(usize, usize), S>;

fn weyl_add<S: Scalar>(w: &mut Weyl<S>, key: (usize, usize), c: S) {
    let e = w.entry(key).or_insert_with(S::zero);
    *e = e.clone() + c;
    if e.is_zero() {
        w.remove(&key);
    }
}

fn weyl_right_d<S: Scalar>(w: Weyl<S>) -> Weyl<S> {
    w.into_iter().map(|((a, b), c)| ((a, b + 1), c)).collect()
}

fn weyl_right_t<S: Scalar>(w: Weyl<S>) -> Weyl<S> {
    // t^a d^b t = t^{a+1} d^b + b t^a d^{b-1}
    let mut out = Weyl::new();
    for ((a, b), c) in w {
        weyl_add(&mut out, (a + 1, b), c.clone());
        if b > 0 {
            weyl_add(&mut out, (a, b - 1), c * S::from_i64(b as i64));
        }
    }
    out
}

/// Normal-ordered image of one word under `X -> i d`, `Y -> sign * t`.
fn realize_word(word: &[Letter], sign: Sign) -> Weyl<Gauss> {
    let mut w: Weyl<Gauss> = Weyl::new();
    w.insert((0, 0), Gauss::one());
    for l in word {
        w = match l {
            Letter::X => weyl_right_d(w),
            Letter::Y => weyl_right_t(w),
        };
    }
    let kx = word.iter().filter(|&&c| c == Letter::X).count();
    let ky = word.len() - kx;
    let scale = i_pow::<Gauss>(kx) * Gauss::from_i64(if ky % 2 == 1 { sign.factor() } else { 1 });
    w.into_iter().map(|(k, c)| (k, c * scale.clone())).collect()
}

/// Realizes `sum_l gamma^-(n-l) P_l(i d_t, ±t)` with all derivatives moved right.
pub fn realize(p: &NcPolynomial, sign: Sign) -> Result<OdeRealization<Gauss>> {
    let n = p.degree();
    let mut monomials = BTreeMap::new();
    for l in 0..=n {
        let p_l = homogeneous_part(p, l)?;
        for (word, c) in p_l.terms() {
            for ((a, b), w) in realize_word(&word.0, sign) {
                let key = Mono { l, a, b };
                let e = monomials.entry(key).or_insert_with(Gauss::zero);
                *e = &*e + &(c * &w);
                if e.is_zero() {
                    monomials.remove(&key);
                }
            }
        }
    }
    Ok(OdeRealization { n, sign, monomials })
}

impl<S: Scalar> OdeRealization<S> {
    pub fn to_c64(&self) -> OdeRealization<C64> {
        OdeRealization {
            n: self.n,
            sign: self.sign,
            monomials: self.monomials.iter().map(|(k, c)| (*k, c.to_c64())).collect(),
        }
    }

    /// The scalar `(-i gamma)^n` that the representation carries in front.
    pub fn prefactor(&self, gamma: C64) -> C64 {
        (C64::new(0.0, -1.0) * gamma).powu(self.n as u32)
    }

    pub fn coeff(&self, l: usize, a: usize, b: usize) -> S {
        self.monomials.get(&Mono { l, a, b }).cloned().unwrap_or_else(S::zero)
    }

    /// Keeps grade `n` only (the gamma -> infinity operator).
    pub fn top_grade(&self) -> Self {
        OdeRealization {
            n: self.n,
            sign: self.sign,
            monomials: self.monomials.iter().filter(|(k, _)| k.l == self.n).map(|(k, c)| (*k, c.clone())).collect(),
        }
    }

    /// Polynomial coefficients in t of each derivative order at a fixed
    /// parameter, given as `ginv = 1/gamma` (`0` is the gamma = infinity limit).
    /// Returns `polys[b][a]`.
    pub fn coeff_polys(&self, ginv: C64) -> Vec<Vec<C64>> {
        let amax = self.monomials.keys().map(|k| k.a).max().unwrap_or(0);
        let mut out = vec![vec![C64::new(0.0, 0.0); amax + 1]; self.n + 1];
        for (k, c) in &self.monomials {
            let w = if k.l == self.n { C64::new(1.0, 0.0) } else { ginv.powu((self.n - k.l) as u32) };
            out[k.b][k.a] += c.to_c64() * w;
        }
        out
    }

    /// Applies the operator to a jet `(f, f', ..., f^(n))` at `t`.
    pub fn apply_jet(&self, jet: &[C64], t: C64, ginv: C64) -> C64 {
        let polys = self.coeff_polys(ginv);
        polys.iter().zip(jet).map(|(p, f)| eval_poly(p, t) * f).sum()
    }

    /// Sum of |coefficient * derivative| terms, a scale for residuals.
    pub fn apply_jet_scale(&self, jet: &[C64], t: C64, ginv: C64) -> f64 {
        let polys = self.coeff_polys(ginv);
        polys.iter().zip(jet).map(|(p, f)| (eval_poly(p, t) * f).norm()).sum()
    }

    /// Formal adjoint `sum (-1)^b d^b (conj(c) t^a .)`, normal ordered.
    /// Grade weights are kept, so evaluate the result at `conj(gamma)`.
    pub fn formal_adjoint(&self) -> Self {
        let mut monomials: BTreeMap<Mono, S> = BTreeMap::new();
        for (k, c) in &self.monomials {
            let base = c.conj() * S::from_i64(if k.b % 2 == 1 { -1 } else { 1 });
            // d^b t^a = sum_j C(b,j) a(a-1)..(a-j+1) t^{a-j} d^{b-j}
            for j in 0..=k.b.min(k.a) {
                let m = binomial(k.b, j) * falling(k.a, j);
                if m == 0 {
                    continue;
                }
                let key = Mono { l: k.l, a: k.a - j, b: k.b - j };
                let e = monomials.entry(key).or_insert_with(S::zero);
                *e = e.clone() + base.clone() * S::from_i64(m);
                if e.is_zero() {
                    monomials.remove(&key);
                }
            }
        }
        OdeRealization { n: self.n, sign: self.sign, monomials }
    }

    /// Monic operator obtained by `t -> -t` and multiplication by `(-1)^n`.
    pub fn reflect(&self) -> Self {
        let monomials = self
            .monomials
            .iter()
            .map(|(k, c)| {
                let s = if (k.a + k.b + self.n) % 2 == 1 { -c.clone() } else { c.clone() };
                (*k, s)
            })
            .collect();
        OdeRealization { n: self.n, sign: self.sign, monomials }
    }

    /// Image under `Y -> -Y`: each monomial picks up `(-1)^((l + a - b)/2)`.
    pub fn parity_flip(&self) -> Self {
        let monomials = self
            .monomials
            .iter()
            .map(|(k, c)| {
                let ky = (k.l + k.a - k.b) / 2;
                let s = if ky % 2 == 1 { -c.clone() } else { c.clone() };
                (*k, s)
            })
            .collect();
        let sign = match self.sign {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        };
        OdeRealization { n: self.n, sign, monomials }
    }

    /// Leading coefficient of `d^n` summed over grades.
    pub fn leading(&self) -> C64 {
        self.monomials.iter().filter(|(k, _)| k.b == self.n).map(|(_, c)| c.to_c64()).sum()
    }

    pub fn to_records(&self) -> Vec<MonomialRecord> {
        self.monomials
            .iter()
            .map(|(k, c)| {
                let z = c.to_c64();
                MonomialRecord { t_power: k.a, d_order: k.b, coeff: [z.re, z.im], grade: k.l }
            })
            .collect()
    }
}

pub fn eval_poly(p: &[C64], t: C64) -> C64 {
    p.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * t + c)
}

pub fn deriv_poly(p: &[C64]) -> Vec<C64> {
    if p.len() <= 1 {
        return vec![C64::new(0.0, 0.0)];
    }
    p.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect()
}
