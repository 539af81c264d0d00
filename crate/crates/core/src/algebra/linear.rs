use super::field::{Field, Q};
use super::matrix::Matrix;
use super::monomial::{Monomial, NVARS};
use super::polynomial::Polynomial;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubstitutionError {
    #[error("substitution matrix must be {NVARS}x{NVARS}, got {0}x{1}")]
    Shape(usize, usize),
    #[error("substitution matrix is singular")]
    Singular,
}

/// `u . f = f(x u^t)` with `x` a row vector: variable `i` is replaced by
/// the linear form `sum_j u[i][j] x_j`.
///
/// Note that `u1 . (u2 . f) = (u2 u1) . f`.
pub fn substitute_linear(u: &Matrix<Q>, f: &Polynomial<Q>) -> Result<Polynomial<Q>, SubstitutionError> {
    if u.rows() != NVARS || u.cols() != NVARS {
        return Err(SubstitutionError::Shape(u.rows(), u.cols()));
    }
    if !u.is_invertible() {
        return Err(SubstitutionError::Singular);
    }
    Ok(substitute_linear_unchecked(u, f))
}

pub(crate) fn substitute_linear_unchecked(u: &Matrix<Q>, f: &Polynomial<Q>) -> Polynomial<Q> {
    let forms: Vec<Polynomial<Q>> = (0..NVARS)
        .map(|i| Polynomial::from_terms((0..NVARS).map(|j| (Monomial::var(j), u.get(i, j).clone()))))
        .collect();
    let max_exp = f.support().flat_map(|m| m.exps().iter().copied()).max().unwrap_or(0) as usize;
    // powers[i][e] = forms[i]^e
    let powers: Vec<Vec<Polynomial<Q>>> = forms
        .iter()
        .map(|l| {
            let mut ps = vec![Polynomial::one()];
            for e in 1..=max_exp {
                let next = ps[e - 1].mul(l);
                ps.push(next);
            }
            ps
        })
        .collect();
    let mut out = Polynomial::zero();
    for (m, c) in f.terms() {
        let mut term = Polynomial::constant(c.clone());
        for (i, &e) in m.exps().iter().enumerate() {
            if e > 0 {
                term = term.mul(&powers[i][e as usize]);
            }
        }
        out = out.add(&term);
    }
    out
}

/// Permutation matrix sending variable `i` to variable `perm[i]` under
/// [`substitute_linear`].
pub fn permutation_matrix(perm: &[usize; NVARS]) -> Matrix<Q> {
    // u . x_i = sum_j u[i][j] x_j should equal x_{perm[i]}
    let mut u = Matrix::zeros(NVARS, NVARS);
    for (i, &p) in perm.iter().enumerate() {
        u.set(i, p, Q::one());
    }
    u
}

/// All 24 permutations of the four variables, in lexicographic order.
pub fn all_permutations() -> Vec<[usize; NVARS]> {
    use itertools::Itertools;
    (0..NVARS)
        .permutations(NVARS)
        .map(|p| [p[0], p[1], p[2], p[3]])
        .collect()
}
