use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{HsolvError, Result};
use crate::scalar::{gauss_from_c64, gauss_is_zero, Gauss, Scalar, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    X,
    Y,
}

/// A noncommutative monomial; the empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct NcWord(pub Vec<Letter>);

impl NcWord {
    pub fn identity() -> Self {
        NcWord(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self, l: Letter) -> usize {
        self.0.iter().filter(|&&c| c == l).count()
    }

    pub fn concat(&self, other: &NcWord) -> NcWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        NcWord(v)
    }

    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .enumerate()
            .map(|(i, c)| match c {
                'X' => Ok(Letter::X),
                'Y' => Ok(Letter::Y),
                _ => Err(HsolvError::Syntax { pos: i, msg: format!("unexpected letter {c:?}") }),
            })
            .collect::<Result<Vec<_>>>()
            .map(NcWord)
    }
}

impl fmt::Display for NcWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            f.write_str(match l {
                Letter::X => "X",
                Letter::Y => "Y",
            })?;
        }
        Ok(())
    }
}

/// Graded polynomial in the noncommuting letters X, Y with exact
/// Gaussian-rational coefficients. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NcPolynomial {
    terms: BTreeMap<NcWord, Gauss>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub coeff: [f64; 2],
    pub word: String,
}

impl NcPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = (NcWord, Gauss)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (w, c) in it {
            p.add_term(w, c);
        }
        p
    }

    pub fn add_term(&mut self, w: NcWord, c: Gauss) {
        let entry = self.terms.entry(w.clone()).or_insert_with(Gauss::zero);
        *entry = &*entry + &c;
        if gauss_is_zero(entry) {
            self.terms.remove(&w);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&NcWord, &Gauss)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &NcWord) -> Gauss {
        self.terms.get(w).cloned().unwrap_or_else(Gauss::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// Maximal word length with a nonzero coefficient (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        self.terms.keys().map(NcWord::len).max().unwrap_or(0)
    }

    pub fn add(&self, other: &NcPolynomial) -> NcPolynomial {
        let mut p = self.clone();
        for (w, c) in other.terms() {
            p.add_term(w.clone(), c.clone());
        }
        p
    }

    pub fn scale(&self, s: &Gauss) -> NcPolynomial {
        NcPolynomial::from_terms(self.terms().map(|(w, c)| (w.clone(), c * s)))
    }

    pub fn mul(&self, other: &NcPolynomial) -> NcPolynomial {
        let mut p = NcPolynomial::zero();
        for (w1, c1) in self.terms() {
            for (w2, c2) in other.terms() {
                p.add_term(w1.concat(w2), c1 * c2);
            }
        }
        p
    }

    /// Image under `Y -> -Y`.
    pub fn flip_y(&self) -> NcPolynomial {
        NcPolynomial::from_terms(self.terms().map(|(w, c)| {
            let c = if w.count(Letter::Y) % 2 == 1 { -c.clone() } else { c.clone() };
            (w.clone(), c)
        }))
    }

    pub fn to_records(&self) -> Vec<TermRecord> {
        self.terms()
            .map(|(w, c)| {
                let z = c.to_c64();
                TermRecord { coeff: [z.re, z.im], word: w.to_string() }
            })
            .collect()
    }

    pub fn from_records(recs: &[TermRecord]) -> Result<Self> {
        let mut p = NcPolynomial::zero();
        for r in recs {
            let c = gauss_from_c64(C64::new(r.coeff[0], r.coeff[1])).ok_or_else(|| {
                HsolvError::InvalidArgument(format!("non-finite coefficient for {}", r.word))
            })?;
            p.add_term(NcWord::parse(&r.word)?, c);
        }
        Ok(p)
    }
}

impl fmt::Display for NcPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        // highest grade first reads naturally
        let mut terms: Vec<_> = self.terms().collect();
        terms.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(b.0)));
        for (w, c) in terms {
            let z = c.to_c64();
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({}{:+}i)", z.re, z.im)?;
            if !w.is_empty() {
                write!(f, "*{w}")?;
            }
        }
        Ok(())
    }
}

/// Restriction of `p` to words of length `l`.
pub fn homogeneous_part(p: &NcPolynomial, l: usize) -> Result<NcPolynomial> {
    if l > p.degree() {
        return Err(HsolvError::DegreeOutOfRange(l));
    }
    Ok(NcPolynomial::from_terms(
        p.terms().filter(|(w, _)| w.len() == l).map(|(w, c)| (w.clone(), c.clone())),
    ))
}

/// Commutative substitution `X -> i z`, `Y -> y`, term by term.
pub fn commutative_symbol(p: &NcPolynomial, z: C64, y: C64) -> C64 {
    let iz = C64::i() * z;
    p.terms()
        .map(|(w, c)| c.to_c64() * iz.powu(w.count(Letter::X) as u32) * y.powu(w.count(Letter::Y) as u32))
        .sum()
}

/// Coefficients (ascending powers of z) of `P(iz, y)` for rational `y`, exactly.
pub fn symbol_coefficients(p: &NcPolynomial, y: &Gauss) -> Vec<Gauss> {
    let deg = p.degree();
    let mut out = vec![Gauss::zero(); deg + 1];
    for (w, c) in p.terms() {
        let kx = w.count(Letter::X);
        let ky = w.count(Letter::Y);
        let mut term = c * crate::scalar::i_pow::<Gauss>(kx);
        for _ in 0..ky {
            term = term * y.clone();
        }
        out[kx] = &out[kx] + &term;
    }
    out
}
