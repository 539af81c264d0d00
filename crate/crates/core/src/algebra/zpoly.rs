use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::field::Q;
use super::univariate::UniPoly;

/// Dense univariate polynomial in `t` over the integers, lowest degree first.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ZPoly {
    coeffs: Vec<BigInt>,
}

impl ZPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        ZPoly { coeffs }
    }

    pub fn zero() -> Self {
        ZPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        ZPoly { coeffs: vec![BigInt::one()] }
    }

    pub fn constant(c: BigInt) -> Self {
        ZPoly::new(vec![c])
    }

    pub fn t() -> Self {
        ZPoly { coeffs: vec![BigInt::zero(), BigInt::one()] }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &ZPoly) -> ZPoly {
        let (long, short) = if self.coeffs.len() >= other.coeffs.len() { (self, other) } else { (other, self) };
        let mut out = long.coeffs.clone();
        for (o, s) in out.iter_mut().zip(&short.coeffs) {
            *o += s;
        }
        ZPoly::new(out)
    }

    pub fn neg(&self) -> ZPoly {
        ZPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, other: &ZPoly) -> ZPoly {
        let mut out = self.coeffs.clone();
        if out.len() < other.coeffs.len() {
            out.resize(other.coeffs.len(), BigInt::zero());
        }
        for (o, s) in out.iter_mut().zip(&other.coeffs) {
            *o -= s;
        }
        ZPoly::new(out)
    }

    pub fn mul(&self, other: &ZPoly) -> ZPoly {
        if self.is_zero() || other.is_zero() {
            return ZPoly::zero();
        }
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ZPoly::new(out)
    }

    pub fn scale(&self, c: &BigInt) -> ZPoly {
        if c.is_zero() {
            return ZPoly::zero();
        }
        ZPoly { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Divides every coefficient by `c`, which must divide them exactly.
    pub fn div_integer(&self, c: &BigInt) -> ZPoly {
        if c.is_one() {
            return self.clone();
        }
        ZPoly { coeffs: self.coeffs.iter().map(|a| a / c).collect() }
    }

    /// Quotient when `divisor` divides `self` in `Z[t]`.
    pub fn checked_div(&self, divisor: &ZPoly) -> Option<ZPoly> {
        let dd = divisor.degree().expect("division by zero polynomial");
        if divisor.is_one() {
            return Some(self.clone());
        }
        if self.is_zero() {
            return Some(ZPoly::zero());
        }
        if self.coeffs.len() < divisor.coeffs.len() {
            return None;
        }
        let lead = &divisor.coeffs[dd];
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let top = &rem[k + dd];
            if top.is_zero() {
                continue;
            }
            let (c, r) = top.div_rem(lead);
            if !r.is_zero() {
                return None;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &c * d;
            }
            quot[k] = c;
        }
        if rem[..dd].iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(ZPoly::new(quot))
    }

    /// Exact quotient; panics when the division is not exact.
    pub fn exact_div(&self, divisor: &ZPoly) -> ZPoly {
        self.checked_div(divisor).expect("inexact polynomial division")
    }

    /// Gcd of the coefficients, nonnegative.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn derivative(&self) -> ZPoly {
        ZPoly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect())
    }

    pub fn eval(&self, t: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + BigRational::from_integer(c.clone());
        }
        acc
    }

    pub fn to_unipoly(&self) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| Q::from_integer(c.clone())).collect())
    }

    /// Integer multiple of `p` with coefficients made coprime, and the
    /// rational factor `p / result`.
    pub fn from_unipoly(p: &UniPoly) -> (ZPoly, Q) {
        let l = p.denominator_lcm();
        let z = ZPoly::new(p.coeffs().iter().map(|c| c.numer() * (&l / c.denom())).collect());
        let c = z.content();
        if c.is_zero() {
            return (z, Q::one());
        }
        (z.div_integer(&c), Q::new(c, l))
    }

    /// Gcd in `Z[t]` with positive leading coefficient; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &ZPoly) -> ZPoly {
        if self.is_zero() {
            return other.with_positive_lead();
        }
        if other.is_zero() {
            return self.with_positive_lead();
        }
        let ca = self.content();
        let cb = other.content();
        let c = ca.gcd(&cb);
        if self.coeffs.len() == 1 || other.coeffs.len() == 1 {
            return ZPoly::constant(c);
        }
        let a = self.div_integer(&ca).with_positive_lead();
        let b = other.div_integer(&cb).with_positive_lead();
        let g = if a == b {
            a
        } else {
            primitive_gcd(&a, &b).unwrap_or_else(|| {
                let monic = a.to_unipoly().euclid_gcd(&b.to_unipoly());
                ZPoly::from_unipoly(&monic).0.with_positive_lead()
            })
        };
        g.scale(&c)
    }

    fn with_positive_lead(&self) -> ZPoly {
        if self.leading().is_some_and(Signed::is_negative) {
            self.neg()
        } else {
            self.clone()
        }
    }
}

impl fmt::Display for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_unipoly())
    }
}

impl fmt::Debug for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

const PRIME_COUNT: usize = 512;

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes just below 2^62, largest first.
fn primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut out = Vec::with_capacity(PRIME_COUNT);
        let mut n = (1u64 << 62) - 1;
        while out.len() < PRIME_COUNT {
            if is_prime(n) {
                out.push(n);
            }
            n -= 2;
        }
        out
    })
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn reduce_mod(c: &BigInt, p: u64) -> u64 {
    c.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits in u64")
}

fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn rem_mod(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let li = inv_mod(b[db], p);
    while r.len() > db {
        let top = r.len() - 1;
        let c = mul_mod(r[top], li, p);
        if c != 0 {
            let shift = top - db;
            for (j, bj) in b.iter().enumerate() {
                let t = mul_mod(c, *bj, p);
                let x = &mut r[shift + j];
                *x = if *x >= t { *x - t } else { *x + p - t };
            }
        }
        r.pop();
        trim(&mut r);
    }
    r
}

/// Monic gcd mod `p`.
fn gcd_mod(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = rem_mod(&a, &b, p);
        a = b;
        b = r;
    }
    if let Some(&l) = a.last() {
        let li = inv_mod(l, p);
        for c in &mut a {
            *c = mul_mod(*c, li, p);
        }
    }
    a
}

/// Gcd of primitive nonconstant `a`, `b` by images mod word-size primes.
///
/// Each image is scaled to leading coefficient `gcd(lc a, lc b)` so the
/// images lift to one integer polynomial; a candidate is accepted once two
/// consecutive lifts agree and it divides both inputs.
fn primitive_gcd(a: &ZPoly, b: &ZPoly) -> Option<ZPoly> {
    let la = a.leading().unwrap();
    let lb = b.leading().unwrap();
    let gamma = la.gcd(lb);
    let mut best_deg = a.coeffs.len().min(b.coeffs.len());
    let mut modulus = BigInt::one();
    let mut residues: Vec<BigInt> = Vec::new();
    let mut previous: Option<ZPoly> = None;
    for &p in primes() {
        if reduce_mod(la, p) == 0 || reduce_mod(lb, p) == 0 {
            continue;
        }
        let ap: Vec<u64> = a.coeffs.iter().map(|c| reduce_mod(c, p)).collect();
        let bp: Vec<u64> = b.coeffs.iter().map(|c| reduce_mod(c, p)).collect();
        let g = gcd_mod(ap, bp, p);
        let d = g.len() - 1;
        if d == 0 {
            return Some(ZPoly::one());
        }
        if d > best_deg {
            continue;
        }
        if d < best_deg {
            best_deg = d;
            modulus = BigInt::one();
            residues = vec![BigInt::zero(); d + 1];
            previous = None;
        }
        let gm = reduce_mod(&gamma, p);
        // x' = x + M ((g - x) M^-1 mod p)
        let m_inv = inv_mod(reduce_mod(&modulus, p), p);
        for (x, &gp) in residues.iter_mut().zip(&g) {
            let target = mul_mod(gp, gm, p);
            let xp = reduce_mod(x, p);
            let diff = if target >= xp { target - xp } else { target + p - xp };
            *x += &modulus * BigInt::from(mul_mod(diff, m_inv, p));
        }
        modulus *= BigInt::from(p);
        let half = &modulus >> 1u32;
        let lifted = ZPoly::new(residues.iter().map(|x| if x > &half { x - &modulus } else { x.clone() }).collect());
        let cont = lifted.content();
        let candidate = lifted.div_integer(&cont).with_positive_lead();
        if previous.as_ref() == Some(&candidate)
            && a.checked_div(&candidate).is_some()
            && b.checked_div(&candidate).is_some()
        {
            return Some(candidate);
        }
        previous = Some(candidate);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z(c: &[i64]) -> ZPoly {
        ZPoly::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    #[test]
    fn gcd_includes_content() {
        // 6(t-1)(t+2) and 4(t-1)(2t+3)
        let a = z(&[-1, 1]).mul(&z(&[2, 1])).scale(&6.into());
        let b = z(&[-1, 1]).mul(&z(&[3, 2])).scale(&4.into());
        assert_eq!(a.gcd(&b), z(&[-2, 2]));
        assert_eq!(z(&[4]).gcd(&z(&[0, 6])), z(&[2]));
        assert_eq!(z(&[0, -3]).gcd(&ZPoly::zero()), z(&[0, 3]));
    }

    #[test]
    fn checked_division() {
        let a = z(&[1, 2, 1]);
        assert_eq!(a.checked_div(&z(&[1, 1])), Some(z(&[1, 1])));
        assert_eq!(a.checked_div(&z(&[1, 2])), None);
        assert_eq!(z(&[2, 4]).checked_div(&z(&[1, 2])), Some(z(&[2])));
    }

    proptest! {
        #[test]
        fn modular_gcd_agrees_with_euclid(
            a in proptest::collection::vec(-30i64..30, 1..7),
            b in proptest::collection::vec(-30i64..30, 1..7),
            c in proptest::collection::vec(-30i64..30, 1..5),
        ) {
            let common = z(&c);
            let a = z(&a).mul(&common);
            let b = z(&b).mul(&common);
            let g = a.gcd(&b);
            let euclid = a.to_unipoly().euclid_gcd(&b.to_unipoly());
            prop_assert_eq!(g.to_unipoly().monic(), euclid);
            if !g.is_zero() {
                prop_assert!(a.checked_div(&g).is_some() && b.checked_div(&g).is_some());
            }
        }
    }

    #[test]
    fn unipoly_round_trip() {
        let p = UniPoly::new(vec![BigRational::new(1.into(), 2.into()), BigRational::new((-3).into(), 4.into())]);
        let (zp, c) = ZPoly::from_unipoly(&p);
        assert_eq!(zp, z(&[2, -3]));
        assert_eq!(zp.to_unipoly().scale(&c), p);
    }
}
