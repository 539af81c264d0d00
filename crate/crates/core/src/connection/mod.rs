//! Griffiths-Dwork reduction, first-order Gauss-Manin matrices of pencils at
//! rational points, and basis-change matrices of linear translates.
//!
//! Matrices index rows by the source basis element and columns by the
//! target Griffiths basis.

mod cache;
mod gm;
mod reduce;
mod translate;

pub use cache::{CachedRing, RingCache};
pub use gm::{gm_connection_at, gm_connection_cached, ConnectionMatrix, ConnectionMatrixJson, Pencil};
pub use reduce::{griffiths_dwork_reduce, PoleForm};
pub use translate::{translate_matrix, TranslateMatrix};

pub(crate) use reduce::reduce_metered;
#[cfg(test)]
pub(crate) use reduce::reduce_with;

use crate::algebra::SubstitutionError;
use crate::budget::Exhausted;
use crate::jacobian::JacobianError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConnectionError {
    #[error("numerator has degree {found}, expected {expected}")]
    DegreeMismatch { expected: u32, found: u32 },
    #[error("numerator is not homogeneous")]
    NotHomogeneous,
    #[error("normal form {monomial} has no basis row at pole order {pole_order}")]
    NoStandardMonomial { monomial: String, pole_order: u32 },
    #[error("pencil member at t = {t0} is not smooth: {source}")]
    SingularMember { t0: String, source: JacobianError },
    #[error(transparent)]
    Jacobian(#[from] JacobianError),
    #[error(transparent)]
    Substitution(#[from] SubstitutionError),
    #[error("reduction stopped: {0}")]
    Budget(Exhausted),
}
