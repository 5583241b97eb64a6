//! Recursive-descent parser for operator expressions.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := coeff '*' word | coeff | word
//! coeff  := decimal | 'i' | decimal 'i' | '(' decimal ('+'|'-') decimal 'i' ')'
//! word   := factor+          factor := ('X'|'Y') ('^' uint)?
//! ```
//! A leading sign on the first term is accepted. Factors may be juxtaposed
//! or separated by `*`.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::{Letter, NcPolynomial, NcWord};
use crate::error::{HsolvError, Result};
use crate::scalar::{parse_decimal, Gauss};

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

pub fn parse_operator(text: &str) -> Result<NcPolynomial> {
    if text.trim().is_empty() {
        return Err(HsolvError::EmptyInput);
    }
    let mut p = Parser { src: text, pos: 0 };
    let poly = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(poly)
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> HsolvError {
        HsolvError::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_raw() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek_raw(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_raw()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<NcPolynomial> {
        let mut out = NcPolynomial::zero();
        let mut sign = if self.eat('-') {
            -1
        } else {
            self.eat('+');
            1
        };
        loop {
            let (c, w) = self.term()?;
            let c = if sign < 0 { -c } else { c };
            out.add_term(w, c);
            if self.eat('+') {
                sign = 1;
            } else if self.eat('-') {
                sign = -1;
            } else {
                break;
            }
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<(Gauss, NcWord)> {
        match self.peek() {
            Some('X') | Some('Y') => Ok((Gauss::one(), self.word()?)),
            Some(c) if c == '(' || c == 'i' || c == '.' || c.is_ascii_digit() => {
                let c = self.coeff()?;
                if self.eat('*') || matches!(self.peek(), Some('X') | Some('Y')) {
                    Ok((c, self.word()?))
                } else {
                    Ok((c, NcWord::identity()))
                }
            }
            Some(_) => Err(self.err("expected coefficient or word")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn decimal(&mut self) -> Result<BigRational> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && (bytes[self.pos].is_ascii_digit() || bytes[self.pos] == b'.') {
            self.pos += 1;
        }
        // optional exponent, only when followed by a digit or sign+digit
        if self.pos < bytes.len() && (bytes[self.pos] == b'e' || bytes[self.pos] == b'E') {
            let mut q = self.pos + 1;
            if q < bytes.len() && (bytes[q] == b'+' || bytes[q] == b'-') {
                q += 1;
            }
            if q < bytes.len() && bytes[q].is_ascii_digit() {
                while q < bytes.len() && bytes[q].is_ascii_digit() {
                    q += 1;
                }
                self.pos = q;
            }
        }
        let text = &self.src[start..self.pos];
        parse_decimal(text).ok_or(HsolvError::Syntax { pos: start, msg: format!("bad number {text:?}") })
    }

    fn coeff(&mut self) -> Result<Gauss> {
        let zero = BigRational::zero();
        if self.eat('(') {
            let neg_re = if self.eat('-') {
                true
            } else {
                self.eat('+');
                false
            };
            let mut re = self.decimal()?;
            if neg_re {
                re = -re;
            }
            let neg_im = if self.eat('+') {
                false
            } else if self.eat('-') {
                true
            } else {
                return Err(self.err("expected '+' or '-' in complex literal"));
            };
            let im = if self.peek() == Some('i') {
                BigRational::one()
            } else {
                self.decimal()?
            };
            if !self.eat('i') {
                return Err(self.err("expected 'i' in complex literal"));
            }
            if !self.eat(')') {
                return Err(self.err("expected ')'"));
            }
            let im = if neg_im { -im } else { im };
            return Ok(Complex::new(re, im));
        }
        if self.eat('i') {
            return Ok(Complex::new(zero, BigRational::one()));
        }
        let d = self.decimal()?;
        if self.peek_raw() == Some('i') {
            self.pos += 1;
            Ok(Complex::new(zero, d))
        } else {
            Ok(Complex::new(d, zero))
        }
    }

    fn word(&mut self) -> Result<NcWord> {
        let mut letters = Vec::new();
        loop {
            let l = match self.peek() {
                Some('X') => Letter::X,
                Some('Y') => Letter::Y,
                _ => break,
            };
            self.pos += 1;
            let mut count = 1usize;
            if self.eat('^') {
                self.skip_ws();
                let start = self.pos;
                let bytes = self.src.as_bytes();
                while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let s = &self.src[start..self.pos];
                count = s
                    .parse::<BigInt>()
                    .ok()
                    .and_then(|b| usize::try_from(b).ok())
                    .filter(|&k| k <= 64)
                    .ok_or(HsolvError::Syntax { pos: start, msg: "expected exponent 0..=64".into() })?;
            }
            letters.extend(std::iter::repeat(l).take(count));
            // '*' may join factors; it must then be followed by another factor
            let save = self.pos;
            if self.eat('*') && !matches!(self.peek(), Some('X') | Some('Y')) {
                self.pos = save;
                return Err(self.err("expected factor after '*'"));
            }
        }
        if letters.is_empty() {
            return Err(self.err("expected 'X' or 'Y'"));
        }
        Ok(NcWord(letters))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::gauss;

    fn w(s: &str) -> NcWord {
        NcWord::parse(s).unwrap()
    }

    #[test]
    fn laplacian_like() {
        let p = parse_operator("-X^2 - Y^2").unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.coeff(&w("XX")), gauss(-1, 0));
        assert_eq!(p.coeff(&w("YY")), gauss(-1, 0));
    }

    #[test]
    fn commutator() {
        let p = parse_operator("X*Y - Y*X").unwrap();
        assert_eq!(p.coeff(&w("XY")), gauss(1, 0));
        assert_eq!(p.coeff(&w("YX")), gauss(-1, 0));
    }

    #[test]
    fn cubic_with_imaginary_coefficients() {
        let p = parse_operator("i*X^3 + 2*X^2*Y + i*X*Y^2 + 2*Y^3").unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p.coeff(&w("XXX")), gauss(0, 1));
        assert_eq!(p.coeff(&w("XXY")), gauss(2, 0));
        assert_eq!(p.coeff(&w("XYY")), gauss(0, 1));
        assert_eq!(p.coeff(&w("YYY")), gauss(2, 0));
    }

    #[test]
    fn literal_forms() {
        let p = parse_operator("(1.5-2i)*XY + 3i X + (-1+i) + 0.25").unwrap();
        let half = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(p.coeff(&w("XY")), Complex::new(half(3, 2), half(-2, 1)));
        assert_eq!(p.coeff(&w("X")), gauss(0, 3));
        assert_eq!(p.coeff(&NcWord::identity()), Complex::new(half(-3, 4), half(1, 1)));
    }

    #[test]
    fn like_terms_combine() {
        let p = parse_operator("XY + 2XY - 3*X*Y").unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(parse_operator("   "), Err(HsolvError::EmptyInput));
        match parse_operator("X + ") {
            Err(HsolvError::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_operator("X + Z"), Err(HsolvError::Syntax { pos: 4, .. })));
        assert!(parse_operator("(1+2)X").is_err());
        assert!(parse_operator("2*").is_err());
    }
}
