//! Jacobian ideals, Gröbner bases with cofactors, standard monomials and the
//! grevlex Griffiths basis.

mod groebner;
mod ring;

pub use groebner::{buchberger, GbError, GbOptions, GroebnerBasis};
pub use ring::{
    express_in_ideal, griffiths_basis, is_smooth, is_smooth_with, jacobian_ideal, residue_degree, BasisRow,
    GriffithsBasis, JacobianError, JacobianRing, QUARTIC_DEGREE, SURFACE_DIM,
};
