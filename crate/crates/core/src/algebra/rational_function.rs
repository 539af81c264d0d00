use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::field::{Field, Q};
use super::univariate::UniPoly;
use super::zpoly::ZPoly;

/// Element of `Q(t)` kept as `num/den` over `Z[t]` with `gcd(num, den) = 1`
/// (content included) and a positive leading coefficient on `den`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: ZPoly,
    den: ZPoly,
}

impl RationalFunction {
    /// Panics if `den` is zero.
    pub fn new(num: UniPoly, den: UniPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let (n, cn) = ZPoly::from_unipoly(&num);
        let (d, cd) = ZPoly::from_unipoly(&den);
        // num/den = (cn/cd) n/d
        let c = cn / cd;
        Self::from_integer_parts(n.scale(c.numer()), d.scale(c.denom()))
    }

    /// Normalizes `num/den` over `Z[t]`; panics if `den` is zero.
    pub fn from_integer_parts(num: ZPoly, den: ZPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.is_one() { (num, den) } else { (num.exact_div(&g), den.exact_div(&g)) };
        if den.leading().is_some_and(Signed::is_negative) {
            num = num.neg();
            den = den.neg();
        }
        RationalFunction { num, den }
    }

    pub fn from_poly(num: UniPoly) -> Self {
        Self::new(num, UniPoly::one())
    }

    pub fn t() -> Self {
        RationalFunction { num: ZPoly::t(), den: ZPoly::one() }
    }

    /// Normalized integer numerator.
    pub fn numer(&self) -> &ZPoly {
        &self.num
    }

    /// Normalized integer denominator.
    pub fn denom(&self) -> &ZPoly {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    /// Value at `t0`, or `None` when `t0` is a pole.
    pub fn eval(&self, t0: &Q) -> Option<Q> {
        let d = self.den.eval(t0);
        if Zero::is_zero(&d) {
            return None;
        }
        Some(self.num.eval(t0) / d)
    }

    pub fn derivative(&self) -> Self {
        if self.num.degree().is_none_or(|d| d == 0) && self.den.degree() == Some(0) {
            return Self::zero();
        }
        // (n'd - nd') / d^2
        let top = self.num.derivative().mul(&self.den).sub(&self.num.mul(&self.den.derivative()));
        Self::from_integer_parts(top, self.den.mul(&self.den))
    }
}

impl Field for RationalFunction {
    fn zero() -> Self {
        RationalFunction { num: ZPoly::zero(), den: ZPoly::one() }
    }
    fn one() -> Self {
        RationalFunction { num: ZPoly::one(), den: ZPoly::one() }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }
    fn plus(&self, other: &Self) -> Self {
        if self.num.is_zero() {
            return other.clone();
        }
        if other.num.is_zero() {
            return self.clone();
        }
        let (a, b, c, d) = (&self.num, &self.den, &other.num, &other.den);
        if b == d {
            return Self::from_integer_parts(a.add(c), b.clone());
        }
        // gcd(a d + c b, b d) = 1 whenever gcd(b, d) = 1
        if b.is_one() {
            return RationalFunction { num: a.mul(d).add(c), den: d.clone() };
        }
        if d.is_one() {
            return RationalFunction { num: a.add(&c.mul(b)), den: b.clone() };
        }
        let g = b.gcd(d);
        if g.is_one() {
            return RationalFunction { num: a.mul(d).add(&c.mul(b)), den: b.mul(d) };
        }
        let b1 = b.exact_div(&g);
        let d1 = d.exact_div(&g);
        let num = a.mul(&d1).add(&c.mul(&b1));
        let den = b1.mul(d);
        if num.is_zero() {
            return Self::zero();
        }
        let h = num.gcd(&g);
        if h.is_one() {
            RationalFunction { num, den }
        } else {
            RationalFunction { num: num.exact_div(&h), den: den.exact_div(&h) }
        }
    }
    fn minus(&self, other: &Self) -> Self {
        self.plus(&other.negated())
    }
    fn times(&self, other: &Self) -> Self {
        if self.num.is_zero() || other.num.is_zero() {
            return Self::zero();
        }
        // cross-cancel before multiplying
        let g1 = self.num.gcd(&other.den);
        let g2 = other.num.gcd(&self.den);
        let (a, d) = if g1.is_one() { (self.num.clone(), other.den.clone()) } else { (self.num.exact_div(&g1), other.den.exact_div(&g1)) };
        let (c, b) = if g2.is_one() { (other.num.clone(), self.den.clone()) } else { (other.num.exact_div(&g2), self.den.exact_div(&g2)) };
        RationalFunction { num: a.mul(&c), den: b.mul(&d) }
    }
    fn negated(&self) -> Self {
        RationalFunction { num: self.num.neg(), den: self.den.clone() }
    }
    fn inverse(&self) -> Self {
        assert!(!self.num.is_zero(), "inverse of zero");
        if self.num.leading().is_some_and(Signed::is_negative) {
            RationalFunction { num: self.den.neg(), den: self.num.neg() }
        } else {
            RationalFunction { num: self.den.clone(), den: self.num.clone() }
        }
    }
    fn from_rational(q: &BigRational) -> Self {
        RationalFunction { num: ZPoly::constant(q.numer().clone()), den: ZPoly::constant(q.denom().clone()) }
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            let c = BigRational::new(BigInt::one(), self.den.coeffs()[0].clone());
            let p = self.num.to_unipoly().scale(&c);
            if p.coeffs().len() > 1 {
                write!(f, "({p})")
            } else {
                write!(f, "{p}")
            }
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::integer;

    fn p(c: &[i64]) -> UniPoly {
        UniPoly::new(c.iter().map(|&x| integer(x)).collect())
    }

    #[test]
    fn normalizes_to_lowest_terms() {
        // (2t - 2) / (4t^2 - 4) = 1 / (2t + 2)
        let r = RationalFunction::new(p(&[-2, 2]), p(&[-4, 0, 4]));
        assert_eq!(r.denom().to_unipoly(), p(&[2, 2]));
        assert_eq!(r.numer().to_unipoly(), p(&[1]));
        let again = RationalFunction::new(p(&[1]).scale(&crate::algebra::field::rational(-1, 3)), p(&[-2, -2]).scale(&crate::algebra::field::rational(1, 3)));
        assert_eq!(again, r);
        assert_eq!(RationalFunction::new(p(&[3, 0, 6]), p(&[-3])).to_string(), "(-2*t^2 - 1)");
    }

    #[test]
    fn field_arithmetic() {
        let a = RationalFunction::new(p(&[1]), p(&[0, 1])); // 1/t
        let b = RationalFunction::new(p(&[1]), p(&[1, 1])); // 1/(t+1)
        let s = a.plus(&b);
        assert_eq!(s, RationalFunction::new(p(&[1, 2]), p(&[0, 1, 1])));
        assert_eq!(s.minus(&b), a);
        assert_eq!(a.times(&a.inverse()), RationalFunction::one());
        assert_eq!(a.over(&b), RationalFunction::new(p(&[1, 1]), p(&[0, 1])));
        assert_eq!(a.eval(&integer(0)), None);
        assert_eq!(b.eval(&integer(1)), Some(crate::algebra::field::rational(1, 2)));
        // d/dt 1/t = -1/t^2
        assert_eq!(a.derivative(), RationalFunction::new(p(&[-1]), p(&[0, 0, 1])));
    }
}
