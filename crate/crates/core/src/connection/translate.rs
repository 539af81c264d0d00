use crate::algebra::{substitute_linear, Matrix, Polynomial, Q};

use super::cache::CachedRing;
use super::reduce::{griffiths_dwork_reduce, PoleForm};
use super::ConnectionError;

/// Basis change from the Griffiths basis of `f` to that of `u . f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranslateMatrix {
    pub u: Matrix<Q>,
    pub f: Polynomial<Q>,
    pub image: Polynomial<Q>,
    pub n: Matrix<Q>,
}

/// Row `i` holds the coordinates of `u . p_i` in the Griffiths basis of
/// `u . f`. With the substitution convention of [`substitute_linear`],
/// `N(u2 u1, f) = N(u2, f) N(u1, u2 . f)`.
pub fn translate_matrix(u: &Matrix<Q>, f: &Polynomial<Q>) -> Result<TranslateMatrix, ConnectionError> {
    let source = CachedRing::new(f)?;
    let image = substitute_linear(u, f)?;
    let target = CachedRing::new(&image)?;
    let m = source.basis.len();
    let mut n = Matrix::zeros(m, target.basis.len());
    for (i, row) in source.basis.rows().iter().enumerate() {
        let moved = substitute_linear(u, &Polynomial::monomial(row.monomial))?;
        let coords = griffiths_dwork_reduce(&PoleForm::new(moved, row.pole_order), &target.ring, &target.basis)?;
        for (j, c) in coords.into_iter().enumerate() {
            n.set(i, j, c);
        }
    }
    Ok(TranslateMatrix { u: u.clone(), f: f.clone(), image, n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{all_permutations, integer, parse_polynomial, permutation_matrix, rational, Field};

    fn poly(s: &str) -> Polynomial<Q> {
        parse_polynomial(s).unwrap()
    }

    #[test]
    fn identity_gives_identity() {
        let f = poly("x^3*y + y^4 + z^4 + w^4");
        let t = translate_matrix(&Matrix::identity(4), &f).unwrap();
        assert_eq!(t.n, Matrix::identity(21));
    }

    #[test]
    fn permutations_of_fermat_permute_the_basis() {
        let f = poly("x^4 + y^4 + z^4 + w^4");
        for perm in all_permutations().into_iter().step_by(5) {
            let t = translate_matrix(&permutation_matrix(&perm), &f).unwrap();
            for i in 0..21 {
                let row = t.n.row(i);
                assert_eq!(row.iter().filter(|c| !c.is_zero()).count(), 1);
                assert!(row.iter().all(|c| c.is_zero() || c == &integer(1) || c == &integer(-1)));
            }
            assert!(t.n.is_invertible());
        }
    }

    #[test]
    fn composition_law_on_permutations() {
        let f = poly("x^3*y + x*y^3 + z^3*w + w^4");
        let perms = all_permutations();
        for (a, b) in [(1, 7), (5, 13), (22, 3)] {
            let u1 = permutation_matrix(&perms[a]);
            let u2 = permutation_matrix(&perms[b]);
            let lhs = translate_matrix(&u2.mul(&u1), &f).unwrap().n;
            let first = translate_matrix(&u2, &f).unwrap();
            let second = translate_matrix(&u1, &first.image).unwrap();
            assert_eq!(lhs, first.n.mul(&second.n));
        }
    }

    #[test]
    fn inverse_translate_undoes_translate() {
        let f = poly("x^3*y + y^4 + z^4 + w^4");
        let mut u = Matrix::identity(4);
        u.set(0, 1, rational(1, 2));
        u.set(2, 2, integer(3));
        let fwd = translate_matrix(&u, &f).unwrap();
        let back = translate_matrix(&u.inverse().unwrap(), &fwd.image).unwrap();
        assert_eq!(fwd.n.mul(&back.n), Matrix::identity(21));
    }

    #[test]
    fn singular_u_is_rejected() {
        let f = poly("x^4 + y^4 + z^4 + w^4");
        let err = translate_matrix(&Matrix::zeros(4, 4), &f).unwrap_err();
        assert!(matches!(err, ConnectionError::Substitution(_)));
    }
}
