//! Text form of rational polynomials: `x^3*y + y^3*z - 3/2*z^3*w + x*w^3`.
//!
//! The printer ([`Polynomial`]'s `Display`) emits exactly this grammar, so
//! `parse_polynomial(&p.to_string()) == p` for every rational polynomial.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::field::Q;
use super::monomial::{Monomial, NVARS, VAR_NAMES};
use super::polynomial::Polynomial;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at position {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

struct Scanner<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { position: self.pos, message: message.into() })
    }

    fn digits(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    fn factor(&mut self, coeff: &mut Q, exps: &mut [u16; NVARS]) -> Result<(), ParseError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let n = self.digits()?;
                let mut q = BigRational::from_integer(n);
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    let d = self.digits()?;
                    if d.is_zero() {
                        return self.err("zero denominator");
                    }
                    q /= BigRational::from_integer(d);
                }
                *coeff *= q;
                Ok(())
            }
            Some(c) => {
                let Some(v) = VAR_NAMES.iter().position(|&n| n as u8 == c) else {
                    return self.err(format!("unexpected character `{}`", c as char));
                };
                self.pos += 1;
                let mut e: u32 = 1;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    let d = self.digits()?;
                    e = match u32::try_from(&d) {
                        Ok(e) if e <= u16::MAX as u32 => e,
                        _ => return self.err("exponent too large"),
                    };
                }
                let total = exps[v] as u32 + e;
                if total > u16::MAX as u32 {
                    return self.err("exponent too large");
                }
                exps[v] = total as u16;
                Ok(())
            }
            None => self.err("unexpected end of input"),
        }
    }

    fn term(&mut self) -> Result<(Monomial, Q), ParseError> {
        let mut coeff = BigRational::from_integer(BigInt::from(1));
        let mut exps = [0u16; NVARS];
        self.factor(&mut coeff, &mut exps)?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            self.factor(&mut coeff, &mut exps)?;
        }
        Ok((Monomial::new(exps), coeff))
    }
}

pub fn parse_polynomial(s: &str) -> Result<Polynomial<Q>, ParseError> {
    let mut sc = Scanner { src: s.as_bytes(), pos: 0 };
    let mut terms = Vec::new();
    let mut sign = match sc.peek() {
        Some(b'-') => {
            sc.pos += 1;
            -1
        }
        Some(b'+') => {
            sc.pos += 1;
            1
        }
        None => return sc.err("empty polynomial"),
        _ => 1,
    };
    loop {
        let (m, c) = sc.term()?;
        terms.push((m, if sign < 0 { -c } else { c }));
        match sc.peek() {
            None => break,
            Some(b'+') => sign = 1,
            Some(b'-') => sign = -1,
            Some(c) => return sc.err(format!("expected `+` or `-`, found `{}`", c as char)),
        }
        sc.pos += 1;
    }
    Ok(Polynomial::from_terms(terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::rational;
    use proptest::prelude::*;

    #[test]
    fn parses_paper_style_input() {
        let p = parse_polynomial("x^3*y + y^3*z + z^3*w + x*w^3").unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p.homogeneous_degree(), Some(4));
        assert_eq!(p.to_string(), "x^3*y + y^3*z + z^3*w + x*w^3");
    }

    #[test]
    fn fractions_signs_and_constants() {
        let p = parse_polynomial("-3/2*x^2 + 4 - y*y").unwrap();
        assert_eq!(p.coeff(&Monomial::new([2, 0, 0, 0])), rational(-3, 2));
        assert_eq!(p.coeff(&Monomial::new([0, 2, 0, 0])), rational(-1, 1));
        assert_eq!(p.coeff(&Monomial::one()), rational(4, 1));
        assert_eq!(parse_polynomial(&p.to_string()).unwrap(), p);
        assert!(parse_polynomial("x - x").unwrap().is_zero());
    }

    #[test]
    fn reports_position() {
        let e = parse_polynomial("x^2 + q").unwrap_err();
        assert_eq!(e.position, 6);
        assert!(parse_polynomial("x^2 +").is_err());
        assert!(parse_polynomial("1/0*x").is_err());
        assert!(parse_polynomial("").is_err());
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(ts in prop::collection::vec(
            ([0u16..5, 0u16..5, 0u16..5, 0u16..5], -20i64..20, 1i64..7), 0..8)) {
            let p = Polynomial::from_terms(ts.into_iter().map(|(e, n, d)| (Monomial::new(e), rational(n, d))));
            if !p.is_zero() {
                prop_assert_eq!(parse_polynomial(&p.to_string()).unwrap(), p);
            }
        }
    }
}
