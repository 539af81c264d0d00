//! Exact polynomial arithmetic in `x, y, z, w` over `Q` and `Q(t)`.

mod field;
mod linear;
mod matrix;
mod monomial;
mod parse;
mod polynomial;
mod rational_function;
mod univariate;
mod zpoly;

pub use field::{
    abs_numer, format_rational, integer, parse_rational, rational, serde_rational, Field, RationalParseError, Q,
};
pub use linear::{all_permutations, permutation_matrix, substitute_linear, SubstitutionError};
pub use matrix::Matrix;
pub use monomial::{grevlex_compare, Monomial, NVARS, VAR_NAMES};
pub use parse::{parse_polynomial, ParseError};
pub use polynomial::{PoleError, Polynomial};
pub use rational_function::RationalFunction;
pub use univariate::UniPoly;
pub use zpoly::ZPoly;

/// The pencil member `(1 - t) f + t g` as a polynomial over `Q(t)`.
pub fn pencil_polynomial(f: &Polynomial<Q>, g: &Polynomial<Q>) -> Polynomial<RationalFunction> {
    let t = RationalFunction::t();
    let one_minus_t = RationalFunction::from_poly(UniPoly::one().sub(&UniPoly::t()));
    f.to_rational_function_coeffs()
        .scale(&one_minus_t)
        .add(&g.to_rational_function_coeffs().scale(&t))
}
