use std::cmp::Ordering;
use std::fmt;

/// Number of variables; the ring is `K[x, y, z, w]` with `x > y > z > w`.
pub const NVARS: usize = 4;

pub const VAR_NAMES: [char; NVARS] = ['x', 'y', 'z', 'w'];

/// A monomial `x^a y^b z^c w^d` with its total degree cached.
///
/// `Ord` is graded reverse lexicographic order.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: [u16; NVARS],
    degree: u32,
}

impl Monomial {
    pub fn new(exps: [u16; NVARS]) -> Self {
        let degree = exps.iter().map(|&e| e as u32).sum();
        Monomial { exps, degree }
    }

    pub fn one() -> Self {
        Monomial::new([0; NVARS])
    }

    pub fn var(i: usize) -> Self {
        let mut exps = [0; NVARS];
        exps[i] = 1;
        Monomial::new(exps)
    }

    pub fn exps(&self) -> &[u16; NVARS] {
        &self.exps
    }

    pub fn exp(&self, i: usize) -> u16 {
        self.exps[i]
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_one(&self) -> bool {
        self.degree == 0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut exps = self.exps;
        for (e, o) in exps.iter_mut().zip(other.exps) {
            *e += o;
        }
        Monomial { exps, degree: self.degree + other.degree }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.degree <= other.degree && self.exps.iter().zip(other.exps).all(|(&a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        debug_assert!(self.divides(other));
        let mut exps = other.exps;
        for (e, s) in exps.iter_mut().zip(self.exps) {
            *e -= s;
        }
        Monomial { exps, degree: other.degree - self.degree }
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let mut exps = self.exps;
        for (e, o) in exps.iter_mut().zip(other.exps) {
            *e = (*e).max(o);
        }
        Monomial::new(exps)
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(other.exps).all(|(&a, b)| a == 0 || b == 0)
    }

    /// If this is `v^e` for a single variable `v`, returns `v`.
    pub fn pure_power_var(&self) -> Option<usize> {
        let mut nz = self.exps.iter().enumerate().filter(|(_, &e)| e > 0);
        match (nz.next(), nz.next()) {
            (Some((i, _)), None) => Some(i),
            _ => None,
        }
    }

    /// Derivative with respect to variable `i`: `(exponent, monomial / x_i)`.
    pub fn derivative(&self, i: usize) -> Option<(u16, Monomial)> {
        let e = self.exps[i];
        if e == 0 {
            return None;
        }
        let mut exps = self.exps;
        exps[i] -= 1;
        Some((e, Monomial { exps, degree: self.degree - 1 }))
    }

    /// Permutes variables: variable `i` of `self` becomes variable `perm[i]`.
    pub fn permuted(&self, perm: &[usize; NVARS]) -> Monomial {
        let mut exps = [0; NVARS];
        for (i, &e) in self.exps.iter().enumerate() {
            exps[perm[i]] = e;
        }
        Monomial { exps, degree: self.degree }
    }

    /// All monomials of total degree `d`, grevlex descending.
    pub fn all_of_degree(d: u32) -> Vec<Monomial> {
        let d = d as u16;
        let mut out = Vec::new();
        for a in 0..=d {
            for b in 0..=d - a {
                for c in 0..=d - a - b {
                    out.push(Monomial::new([a, b, c, d - a - b - c]));
                }
            }
        }
        out.sort_by(|a, b| b.cmp(a));
        out
    }
}

/// Graded reverse lexicographic comparison.
pub fn grevlex_compare(a: &Monomial, b: &Monomial) -> Ordering {
    match a.degree.cmp(&b.degree) {
        Ordering::Equal => {}
        ord => return ord,
    }
    for i in (0..NVARS).rev() {
        match a.exps[i].cmp(&b.exps[i]) {
            Ordering::Equal => continue,
            // smaller exponent in the last differing variable wins
            ord => return ord.reverse(),
        }
    }
    Ordering::Equal
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        grevlex_compare(self, other)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{}", VAR_NAMES[i])?;
            } else {
                write!(f, "{}^{}", VAR_NAMES[i], e)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(e: [u16; 4]) -> Monomial {
        Monomial::new(e)
    }

    #[test]
    fn basic_comparisons() {
        assert_eq!(grevlex_compare(&m([2, 0, 0, 0]), &m([1, 1, 0, 0])), Ordering::Greater);
        assert_eq!(grevlex_compare(&m([4, 0, 0, 0]), &m([4, 0, 0, 0])), Ordering::Equal);
        // x*z^2 vs y^3: last differing entry is z (2 vs 0), larger exponent loses
        assert_eq!(grevlex_compare(&m([1, 0, 2, 0]), &m([0, 3, 0, 0])), Ordering::Less);
        assert_eq!(grevlex_compare(&m([0, 0, 0, 1]), &m([0, 0, 0, 0])), Ordering::Greater);
    }

    #[test]
    fn degree_four_sort_matches_insertion_sort() {
        // definitional comparison: exponent difference vector, last nonzero entry
        fn definitional_greater(a: &Monomial, b: &Monomial) -> bool {
            if a.degree() != b.degree() {
                return a.degree() > b.degree();
            }
            let diff: Vec<i32> = (0..4).map(|i| a.exp(i) as i32 - b.exp(i) as i32).collect();
            match diff.iter().rev().find(|&&d| d != 0) {
                Some(&d) => d < 0,
                None => false,
            }
        }
        let mut all: Vec<Monomial> = Vec::new();
        for a in 0..=4u16 {
            for b in 0..=4 - a {
                for c in 0..=4 - a - b {
                    all.push(m([a, b, c, 4 - a - b - c]));
                }
            }
        }
        assert_eq!(all.len(), 35);
        let mut oracle: Vec<Monomial> = Vec::new();
        for x in &all {
            let pos = oracle.iter().position(|y| definitional_greater(x, y)).unwrap_or(oracle.len());
            oracle.insert(pos, *x);
        }
        assert_eq!(Monomial::all_of_degree(4), oracle);
        assert_eq!(oracle[0], m([4, 0, 0, 0]));
        assert_eq!(oracle[34], m([0, 0, 0, 4]));
    }

    #[test]
    fn strict_total_order_up_to_degree_four() {
        let all: Vec<Monomial> = (0..=4).flat_map(Monomial::all_of_degree).collect();
        for a in &all {
            for b in &all {
                let ab = grevlex_compare(a, b);
                assert_eq!(ab, grevlex_compare(b, a).reverse());
                assert_eq!(ab == Ordering::Equal, a == b);
                for c in &all {
                    if ab == Ordering::Greater && grevlex_compare(b, c) == Ordering::Greater {
                        assert_eq!(grevlex_compare(a, c), Ordering::Greater);
                    }
                }
            }
        }
    }

    #[test]
    fn divisibility_and_lcm() {
        let a = m([2, 1, 0, 0]);
        let b = m([1, 0, 0, 3]);
        assert!(!a.divides(&b));
        let l = a.lcm(&b);
        assert_eq!(l, m([2, 1, 0, 3]));
        assert!(a.divides(&l) && b.divides(&l));
        assert_eq!(a.quotient_of(&l), m([0, 0, 0, 3]));
        assert!(m([3, 0, 0, 0]).is_coprime(&m([0, 3, 0, 0])));
        assert_eq!(m([0, 0, 5, 0]).pure_power_var(), Some(2));
        assert_eq!(m([1, 0, 5, 0]).pure_power_var(), None);
    }
}
