//! Coefficient scalars: exact Gaussian rationals and `Complex<f64>`.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

pub type Gauss = Complex<BigRational>;
pub type C64 = Complex<f64>;

pub trait Scalar: Clone + Num + Neg<Output = Self> + Debug + Send + Sync + 'static {
    fn from_i64(v: i64) -> Self;
    fn to_c64(&self) -> C64;
    fn conj(&self) -> Self;
    fn imag() -> Self;
    fn is_exact() -> bool;
}

impl Scalar for Gauss {
    fn from_i64(v: i64) -> Self {
        Complex::new(BigRational::from_integer(BigInt::from(v)), BigRational::zero())
    }
    fn to_c64(&self) -> C64 {
        Complex::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn imag() -> Self {
        Complex::new(BigRational::zero(), BigRational::one())
    }
    fn is_exact() -> bool {
        true
    }
}

impl Scalar for C64 {
    fn from_i64(v: i64) -> Self {
        Complex::new(v as f64, 0.0)
    }
    fn to_c64(&self) -> C64 {
        *self
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn imag() -> Self {
        C64::new(0.0, 1.0)
    }
    fn is_exact() -> bool {
        false
    }
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // huge numerator/denominator: shift both down before dividing
    let bits = r.numer().bits().max(r.denom().bits()) as i64 - 1000;
    let shift = bits.max(0) as usize;
    let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
    n / d
}

/// Exact rational value of a finite double.
pub fn rat_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

pub fn gauss(re: i64, im: i64) -> Gauss {
    Complex::new(
        BigRational::from_integer(BigInt::from(re)),
        BigRational::from_integer(BigInt::from(im)),
    )
}

pub fn gauss_from_c64(z: C64) -> Option<Gauss> {
    Some(Complex::new(rat_from_f64(z.re)?, rat_from_f64(z.im)?))
}

/// Parses an unsigned decimal literal (`12`, `0.25`, `3e-2`) exactly.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(p) => (&s[..p], s[p + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (int, frac) = match mant.find('.') {
        Some(p) => (&mant[..p], &mant[p + 1..]),
        None => (mant, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let num = BigInt::from_str_radix(&digits, 10).ok()?;
    let e = exp - frac.len() as i64;
    let ten = BigInt::from(10);
    let r = if e >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, e as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-e) as usize))
    };
    Some(r)
}

pub fn gauss_is_zero(z: &Gauss) -> bool {
    z.re.is_zero() && z.im.is_zero()
}

pub fn gauss_is_one(z: &Gauss) -> bool {
    z.re.is_one() && z.im.is_zero()
}

pub fn gauss_abs_f64(z: &Gauss) -> f64 {
    z.to_c64().norm()
}

pub fn rat_abs(r: &BigRational) -> BigRational {
    r.abs()
}

/// `i^k` for integer `k >= 0`.
pub fn i_pow<S: Scalar>(k: usize) -> S {
    match k % 4 {
        0 => S::one(),
        1 => S::imag(),
        2 => -S::one(),
        _ => -S::imag(),
    }
}

pub fn binomial(n: usize, k: usize) -> i64 {
    if k > n {
        return 0;
    }
    let mut r: i64 = 1;
    for i in 0..k.min(n - k) {
        r = r * (n - i) as i64 / (i + 1) as i64;
    }
    r
}

/// Falling factorial `a (a-1) ... (a-k+1)`.
pub fn falling(a: usize, k: usize) -> i64 {
    if k > a {
        return 0;
    }
    (0..k).map(|i| (a - i) as i64).product()
}
