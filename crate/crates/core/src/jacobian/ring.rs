use std::collections::{BTreeMap, HashMap};

use crate::algebra::{Field, Monomial, Polynomial, NVARS};
use crate::budget::{Exhausted, Meter};

use super::groebner::{buchberger, GbError, GbOptions, GroebnerBasis};

/// Dimension `n` of the hypersurfaces handled here (surfaces in P^3).
pub const SURFACE_DIM: u32 = 2;
/// Degree `d` of the hypersurfaces handled here.
pub const QUARTIC_DEGREE: u32 = 4;

/// Numerator degree `k d - n - 2` of a residue form with pole order `k` on a
/// degree-`d` hypersurface of dimension `n`; `None` when negative.
pub fn residue_degree(n: u32, d: u32, pole_order: u32) -> Option<u32> {
    (pole_order * d).checked_sub(n + 2)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum JacobianError {
    #[error("polynomial is zero")]
    ZeroPolynomial,
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("hypersurface is singular: Jacobian ideal is not zero-dimensional (leading monomials {leading_monomials:?})")]
    NotSmooth { leading_monomials: Vec<String> },
    #[error(transparent)]
    Groebner(#[from] GbError),
    #[error("polynomial is not in the Jacobian ideal (normal form {normal_form})")]
    NotInIdeal { normal_form: String },
}

/// The four partial derivatives of a homogeneous polynomial.
pub fn jacobian_ideal<K: Field>(f: &Polynomial<K>) -> Result<[Polynomial<K>; NVARS], JacobianError> {
    if f.is_zero() {
        return Err(JacobianError::ZeroPolynomial);
    }
    if f.homogeneous_degree().is_none() {
        return Err(JacobianError::NotHomogeneous);
    }
    Ok(std::array::from_fn(|i| f.partial_derivative(i)))
}

/// Zero-dimensionality of the Jacobian ideal, i.e. smoothness of `Z(f)`.
pub fn is_smooth<K: Field>(f: &Polynomial<K>) -> bool {
    is_smooth_with(f, &mut Meter::unlimited()).unwrap_or(false)
}

pub fn is_smooth_with<K: Field>(f: &Polynomial<K>, meter: &mut Meter) -> Result<bool, GbError> {
    let Ok(partials) = jacobian_ideal(f) else {
        return Ok(false);
    };
    if partials.iter().any(Polynomial::is_zero) {
        // some variable is absent, so f is a cone
        return Ok(false);
    }
    let opts = GbOptions { track_cofactors: false, stop_when_zero_dimensional: true };
    let gb = buchberger(&partials, opts, meter)?;
    Ok(gb.is_zero_dimensional())
}

/// `R = K[x,y,z,w] / jac(f)` for a smooth `f`, with a cofactor-tracking basis.
#[derive(Clone, Debug)]
pub struct JacobianRing<K: Field> {
    f: Polynomial<K>,
    partials: [Polynomial<K>; NVARS],
    gb: GroebnerBasis<K>,
    standard: BTreeMap<u32, Vec<Monomial>>,
}

impl<K: Field> JacobianRing<K> {
    pub fn new(f: &Polynomial<K>) -> Result<Self, JacobianError> {
        Self::with_meter(f, &mut Meter::unlimited())
    }

    pub fn with_meter(f: &Polynomial<K>, meter: &mut Meter) -> Result<Self, JacobianError> {
        let partials = jacobian_ideal(f)?;
        if partials.iter().any(Polynomial::is_zero) {
            return Err(JacobianError::NotSmooth { leading_monomials: vec![] });
        }
        let gb = buchberger(&partials, GbOptions::with_cofactors(), meter)?;
        if !gb.is_zero_dimensional() {
            return Err(JacobianError::NotSmooth {
                leading_monomials: gb.leading_monomials().map(|m| m.to_string()).collect(),
            });
        }
        let mut standard = BTreeMap::new();
        for d in 0.. {
            let ms: Vec<Monomial> =
                Monomial::all_of_degree(d).into_iter().filter(|m| gb.is_standard(m)).collect();
            if ms.is_empty() {
                break;
            }
            standard.insert(d, ms);
        }
        Ok(JacobianRing { f: f.clone(), partials, gb, standard })
    }

    pub fn polynomial(&self) -> &Polynomial<K> {
        &self.f
    }

    pub fn partials(&self) -> &[Polynomial<K>; NVARS] {
        &self.partials
    }

    pub fn groebner_basis(&self) -> &GroebnerBasis<K> {
        &self.gb
    }

    /// Standard monomials of degree `d`, grevlex descending.
    pub fn standard_monomials(&self, d: u32) -> &[Monomial] {
        self.standard.get(&d).map_or(&[], Vec::as_slice)
    }

    /// Dimensions of the graded pieces `R_0, R_1, ...`.
    pub fn hilbert_function(&self) -> Vec<usize> {
        self.standard.values().map(Vec::len).collect()
    }

    pub fn dimension(&self) -> usize {
        self.standard.values().map(Vec::len).sum()
    }

    pub fn normal_form(&self, p: &Polynomial<K>) -> Polynomial<K> {
        self.gb.normal_form(p)
    }

    /// Splits `p = h + sum_i a_i * d_i f` with `h` the normal form.
    pub fn split(&self, p: &Polynomial<K>) -> (Polynomial<K>, [Polynomial<K>; NVARS]) {
        self.split_metered(p, &mut Meter::unlimited()).expect("unlimited meter")
    }

    #[allow(clippy::type_complexity)]
    pub fn split_metered(
        &self,
        p: &Polynomial<K>,
        meter: &mut Meter,
    ) -> Result<(Polynomial<K>, [Polynomial<K>; NVARS]), Exhausted> {
        let (h, quotients) = self.gb.divide_metered(p, meter)?;
        let cof = self.gb.cofactors().expect("Jacobian ring bases always track cofactors");
        let mut a: [Polynomial<K>; NVARS] = Default::default();
        for (q, c) in quotients.iter().zip(cof) {
            if q.is_zero() {
                continue;
            }
            for i in 0..NVARS {
                if !c[i].is_zero() {
                    a[i] = a[i].add(&q.mul(&c[i]));
                }
            }
            meter.check()?;
        }
        Ok((h, a))
    }

    pub fn express_in_ideal(&self, p: &Polynomial<K>) -> Result<[Polynomial<K>; NVARS], JacobianError> {
        let (h, a) = self.split(p);
        if !h.is_zero() {
            return Err(JacobianError::NotInIdeal { normal_form: h.to_string() });
        }
        Ok(a)
    }

    /// Griffiths basis for quartic surfaces: pole orders 1, 2, 3.
    pub fn griffiths_basis(&self) -> GriffithsBasis {
        let d = self.f.homogeneous_degree().unwrap_or(QUARTIC_DEGREE);
        let mut rows = Vec::new();
        for k in 1..=SURFACE_DIM + 1 {
            if let Some(deg) = residue_degree(SURFACE_DIM, d, k) {
                for m in self.standard_monomials(deg) {
                    rows.push(BasisRow { monomial: *m, pole_order: k });
                }
            }
        }
        GriffithsBasis::new(rows)
    }
}

pub fn express_in_ideal<K: Field>(
    p: &Polynomial<K>,
    ring: &JacobianRing<K>,
) -> Result<[Polynomial<K>; NVARS], JacobianError> {
    ring.express_in_ideal(p)
}

pub fn griffiths_basis<K: Field>(f: &Polynomial<K>) -> Result<GriffithsBasis, JacobianError> {
    Ok(JacobianRing::new(f)?.griffiths_basis())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisRow {
    pub monomial: Monomial,
    pub pole_order: u32,
}

/// Ordered Griffiths basis rows: pole order ascending, grevlex descending
/// within a degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GriffithsBasis {
    rows: Vec<BasisRow>,
    index: HashMap<(Monomial, u32), usize>,
}

impl GriffithsBasis {
    pub fn new(rows: Vec<BasisRow>) -> Self {
        let index = rows.iter().enumerate().map(|(i, r)| ((r.monomial, r.pole_order), i)).collect();
        GriffithsBasis { rows, index }
    }

    pub fn rows(&self) -> &[BasisRow] {
        &self.rows
    }

    /// Number of rows, `m_0`.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn position(&self, m: &Monomial, pole_order: u32) -> Option<usize> {
        self.index.get(&(*m, pole_order)).copied()
    }

    /// Row counts per pole order `1, 2, ...`.
    pub fn counts_by_pole_order(&self) -> Vec<usize> {
        let max = self.rows.iter().map(|r| r.pole_order).max().unwrap_or(0);
        (1..=max).map(|k| self.rows.iter().filter(|r| r.pole_order == k).count()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_polynomial, Q};

    fn poly(s: &str) -> Polynomial<Q> {
        parse_polynomial(s).unwrap()
    }

    #[test]
    fn jacobian_of_examples() {
        let j = jacobian_ideal(&poly("x^4 + y^4 + z^4 + w^4")).unwrap();
        assert_eq!(j[0], poly("4*x^3"));
        assert_eq!(j[2], poly("4*z^3"));
        let j = jacobian_ideal(&poly("x^3*y + x*y^3 + z^3*w + w^4")).unwrap();
        assert_eq!(j[0], poly("3*x^2*y + y^3"));
        assert_eq!(j[1], poly("x^3 + 3*x*y^2"));
        assert_eq!(j[2], poly("3*z^2*w"));
        assert_eq!(j[3], poly("z^3 + 4*w^3"));
        assert_eq!(jacobian_ideal(&Polynomial::<Q>::zero()).unwrap_err(), JacobianError::ZeroPolynomial);
        assert_eq!(jacobian_ideal(&poly("x^2 + y")).unwrap_err(), JacobianError::NotHomogeneous);
    }

    #[test]
    fn smoothness_examples() {
        assert!(is_smooth(&poly("x^4 + y^4 + z^4 + w^4")));
        assert!(is_smooth(&poly("x^3*y + x*y^3 + z^3*w + w^4")));
        assert!(!is_smooth(&poly("x^4 + y^4 + z^4")));
        assert!(!is_smooth(&poly("x^4")));
        // singular at (0:0:0:1)
        assert!(!is_smooth(&poly("x^4 + y^4 + z^4 + x*y*z*w")));
    }

    #[test]
    fn fermat_standard_monomials() {
        let ring = JacobianRing::new(&poly("x^4 + y^4 + z^4 + w^4")).unwrap();
        assert_eq!(ring.hilbert_function(), vec![1, 4, 10, 16, 19, 16, 10, 4, 1]);
        let deg4 = ring.standard_monomials(4);
        assert_eq!(deg4.len(), 19);
        assert!(deg4.iter().all(|m| m.exps().iter().all(|&e| e <= 2)));
        assert_eq!(ring.standard_monomials(8), &[Monomial::new([2, 2, 2, 2])]);
        let basis = ring.griffiths_basis();
        assert_eq!(basis.len(), 21);
        assert_eq!(basis.counts_by_pole_order(), vec![1, 19, 1]);
        assert_eq!(basis.rows()[0], BasisRow { monomial: Monomial::one(), pole_order: 1 });
        assert_eq!(basis.rows()[20].monomial, Monomial::new([2, 2, 2, 2]));
    }

    #[test]
    fn normal_forms_on_fermat() {
        let ring = JacobianRing::new(&poly("x^4 + y^4 + z^4 + w^4")).unwrap();
        assert!(ring.normal_form(&poly("x^3")).is_zero());
        assert_eq!(ring.normal_form(&poly("x^2*y^2")), poly("x^2*y^2"));
    }

    #[test]
    fn ideal_membership_cofactors() {
        let ring = JacobianRing::new(&poly("x^4 + y^4 + z^4 + w^4")).unwrap();
        let a = ring.express_in_ideal(&poly("4*x^3")).unwrap();
        assert_eq!(a, [poly("1"), Polynomial::zero(), Polynomial::zero(), Polynomial::zero()]);
        let a = ring.express_in_ideal(&poly("x^3 + y^3")).unwrap();
        assert_eq!(a[0], poly("1/4"));
        assert_eq!(a[1], poly("1/4"));
        assert!(a[2].is_zero() && a[3].is_zero());
        assert!(matches!(
            ring.express_in_ideal(&poly("x^2*y^2")),
            Err(JacobianError::NotInIdeal { .. })
        ));
    }

    #[test]
    fn singular_ring_is_rejected_with_certificate() {
        match JacobianRing::new(&poly("x^4 + y^4 + z^4 + x*y*z*w")) {
            Err(JacobianError::NotSmooth { leading_monomials }) => assert!(!leading_monomials.is_empty()),
            other => panic!("expected NotSmooth, got {other:?}"),
        }
    }

    #[test]
    fn residue_degrees_for_quartic_surfaces() {
        assert_eq!(residue_degree(2, 4, 1), Some(0));
        assert_eq!(residue_degree(2, 4, 2), Some(4));
        assert_eq!(residue_degree(2, 4, 3), Some(8));
        // cubic threefolds: (n, d) = (3, 3)
        assert_eq!(residue_degree(3, 3, 2), Some(1));
        assert_eq!(residue_degree(3, 3, 1), None);
    }
}
