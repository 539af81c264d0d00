use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use super::field::{Field, Q};
use super::monomial::{Monomial, NVARS};
use super::rational_function::RationalFunction;

/// Sparse polynomial in `x, y, z, w` over a field `K`.
///
/// Terms are stored strictly descending in grevlex order with no zero
/// coefficients, so structural equality is mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial<K: Field> {
    terms: Vec<(Monomial, K)>,
}

impl<K: Field> Default for Polynomial<K> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<K: Field> Polynomial<K> {
    pub fn zero() -> Self {
        Polynomial { terms: Vec::new() }
    }

    pub fn constant(c: K) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn one() -> Self {
        Self::constant(K::one())
    }

    pub fn term(c: K, m: Monomial) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Polynomial { terms: vec![(m, c)] }
        }
    }

    pub fn monomial(m: Monomial) -> Self {
        Self::term(K::one(), m)
    }

    pub fn var(i: usize) -> Self {
        Self::monomial(Monomial::var(i))
    }

    /// Builds a polynomial from arbitrary terms, combining duplicates.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, K)>>(terms: I) -> Self {
        let mut map: BTreeMap<Monomial, K> = BTreeMap::new();
        for (m, c) in terms {
            match map.get_mut(&m) {
                Some(acc) => *acc = acc.plus(&c),
                None => {
                    map.insert(m, c);
                }
            }
        }
        let terms = map.into_iter().rev().filter(|(_, c)| !c.is_zero()).collect();
        Polynomial { terms }
    }

    /// Takes terms already sorted strictly descending with nonzero coefficients.
    pub(crate) fn from_sorted_unchecked(terms: Vec<(Monomial, K)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 > w[1].0));
        debug_assert!(terms.iter().all(|(_, c)| !c.is_zero()));
        Polynomial { terms }
    }

    pub fn terms(&self) -> &[(Monomial, K)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Monomial, K)> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &K)> {
        self.terms.first().map(|(m, c)| (m, c))
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.first().map(|(m, _)| m)
    }

    pub fn leading_coeff(&self) -> Option<&K> {
        self.terms.first().map(|(_, c)| c)
    }

    pub fn coeff(&self, m: &Monomial) -> K {
        self.terms
            .binary_search_by(|(tm, _)| m.cmp(tm))
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_else(|_| K::zero())
    }

    /// Common total degree of all terms; `None` for zero or inhomogeneous input.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let d = self.terms.first()?.0.degree();
        self.terms.iter().all(|(m, _)| m.degree() == d).then_some(d)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    pub fn support(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.iter().map(|(m, _)| m)
    }

    pub fn neg(&self) -> Self {
        Polynomial { terms: self.terms.iter().map(|(m, c)| (*m, c.negated())).collect() }
    }

    pub fn scale(&self, c: &K) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        if c.is_one() {
            return self.clone();
        }
        Polynomial { terms: self.terms.iter().map(|(m, a)| (*m, a.times(c))).collect() }
    }

    /// `c * m * self`.
    pub fn mul_term(&self, c: &K, m: &Monomial) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Polynomial { terms: self.terms.iter().map(|(tm, a)| (tm.mul(m), a.times(c))).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(&K::one(), &Monomial::one(), other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(&K::one().negated(), &Monomial::one(), other);
        out
    }

    /// `self += c * m * other`, merging in place.
    pub fn add_scaled(&mut self, c: &K, m: &Monomial, other: &Self) {
        if c.is_zero() || other.is_zero() {
            return;
        }
        let old = std::mem::take(&mut self.terms);
        let mut out = Vec::with_capacity(old.len() + other.terms.len());
        let mut a = old.into_iter().peekable();
        let mut b = other.terms.iter().map(|(tm, tc)| (tm.mul(m), tc)).peekable();
        loop {
            let ord = match (a.peek(), b.peek()) {
                (Some((am, _)), Some((bm, _))) => am.cmp(bm),
                (Some(_), None) => Ordering::Greater,
                (None, Some(_)) => Ordering::Less,
                (None, None) => break,
            };
            match ord {
                Ordering::Greater => out.push(a.next().unwrap()),
                Ordering::Less => {
                    let (bm, bc) = b.next().unwrap();
                    out.push((bm, bc.times(c)));
                }
                Ordering::Equal => {
                    let (am, ac) = a.next().unwrap();
                    let (_, bc) = b.next().unwrap();
                    let s = ac.plus(&bc.times(c));
                    if !s.is_zero() {
                        out.push((am, s));
                    }
                }
            }
        }
        self.terms = out;
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let (small, big) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        let mut acc = Self::zero();
        for (m, c) in &small.terms {
            acc.add_scaled(c, m, big);
        }
        acc
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn partial_derivative(&self, i: usize) -> Self {
        let terms = self.terms.iter().filter_map(|(m, c)| {
            m.derivative(i).map(|(e, dm)| (dm, c.times(&K::from_i64(e as i64))))
        });
        Polynomial::from_terms(terms)
    }

    pub fn monic(&self) -> Self {
        match self.leading_coeff() {
            None => Self::zero(),
            Some(c) if c.is_one() => self.clone(),
            Some(c) => self.scale(&c.inverse()),
        }
    }

    pub fn map_coeffs<L: Field>(&self, f: impl Fn(&K) -> L) -> Polynomial<L> {
        Polynomial {
            terms: self
                .terms
                .iter()
                .filter_map(|(m, c)| {
                    let v = f(c);
                    (!v.is_zero()).then_some((*m, v))
                })
                .collect(),
        }
    }

    /// Renames variables: variable `i` becomes variable `perm[i]`.
    pub fn permute_variables(&self, perm: &[usize; NVARS]) -> Self {
        Polynomial::from_terms(self.terms.iter().map(|(m, c)| (m.permuted(perm), c.clone())))
    }

    /// Re-sorts and drops zeros; a no-op on any value built through this API.
    pub fn normalized(&self) -> Self {
        Polynomial::from_terms(self.terms.iter().cloned())
    }
}

impl Polynomial<Q> {
    /// Embeds a rational polynomial into `Q(t)[x, y, z, w]`.
    pub fn to_rational_function_coeffs(&self) -> Polynomial<RationalFunction> {
        self.map_coeffs(RationalFunction::from_rational)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("coefficient of {monomial} has a pole at t = {t0}")]
pub struct PoleError {
    pub monomial: String,
    pub t0: String,
}

impl Polynomial<RationalFunction> {
    /// Evaluates every coefficient at `t = t0`.
    pub fn evaluate_t(&self, t0: &Q) -> Result<Polynomial<Q>, PoleError> {
        let mut terms = Vec::with_capacity(self.len());
        for (m, c) in &self.terms {
            let v = c.eval(t0).ok_or_else(|| PoleError {
                monomial: m.to_string(),
                t0: super::field::format_rational(t0),
            })?;
            if !Field::is_zero(&v) {
                terms.push((*m, v));
            }
        }
        Ok(Polynomial { terms })
    }

    /// Coefficientwise derivative in `t`.
    pub fn derivative_t(&self) -> Self {
        self.map_coeffs(|c| c.derivative())
    }
}

impl<K: Field> fmt::Display for Polynomial<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let s = c.to_string();
            let (neg, mag) = match s.strip_prefix('-') {
                // only strip the sign of bare rationals, not of parenthesized expressions
                Some(rest) if !rest.contains(['(', ' ']) => (true, rest.to_string()),
                _ => (false, s),
            };
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            match (mag.as_str(), m.is_one()) {
                (_, true) => write!(f, "{mag}")?,
                ("1", false) => write!(f, "{m}")?,
                (_, false) => write!(f, "{mag}*{m}")?,
            }
        }
        Ok(())
    }
}

impl<K: Field> fmt::Debug for Polynomial<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
