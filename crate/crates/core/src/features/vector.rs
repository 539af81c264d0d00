use num_traits::ToPrimitive;

use crate::algebra::{Monomial, Polynomial, Q};
use crate::jacobian::QUARTIC_DEGREE;

pub const EDGE_VECTOR_DIM: usize = 70;

/// Dense coefficients of a quartic over the 35 degree-4 monomials,
/// grevlex descending.
pub fn coefficient_vector(f: &Polynomial<Q>) -> Vec<f64> {
    Monomial::all_of_degree(QUARTIC_DEGREE)
        .iter()
        .map(|m| f.coeff(m).to_f64().unwrap_or(f64::NAN))
        .collect()
}

/// Endpoint coefficient vectors of an edge, concatenated.
pub fn edge_vector(f: &Polynomial<Q>, g: &Polynomial<Q>) -> Vec<f64> {
    let mut v = coefficient_vector(f);
    v.extend(coefficient_vector(g));
    v
}
