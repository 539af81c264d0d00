use crate::algebra::{Field, Polynomial, NVARS};
use crate::budget::{Exhausted, Meter};
use crate::jacobian::{GriffithsBasis, JacobianRing, QUARTIC_DEGREE, SURFACE_DIM};

use super::ConnectionError;

/// `numerator / f^pole_order` times the volume form, over the quartic of a
/// [`JacobianRing`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoleForm<K: Field> {
    pub numerator: Polynomial<K>,
    pub pole_order: u32,
}

impl<K: Field> PoleForm<K> {
    pub fn new(numerator: Polynomial<K>, pole_order: u32) -> Self {
        assert!(pole_order >= 1, "pole order must be positive");
        PoleForm { numerator, pole_order }
    }

    /// Numerator degree required for a residue form of this pole order.
    pub fn expected_degree(&self) -> u32 {
        self.pole_order * QUARTIC_DEGREE - SURFACE_DIM - 2
    }
}

/// Griffiths-Dwork reduction to coordinates in the Griffiths basis.
///
/// At pole order `k` the numerator splits as `h + sum_i a_i d_i f` with `h`
/// the normal form; `h` lands on basis rows of pole order `k` and the ideal
/// part continues at pole order `k - 1` as `(1/(k-1)) sum_i d a_i / d x_i`.
pub fn griffiths_dwork_reduce<K: Field>(
    form: &PoleForm<K>,
    ring: &JacobianRing<K>,
    basis: &GriffithsBasis,
) -> Result<Vec<K>, ConnectionError> {
    reduce_with(form, ring, basis, &mut Meter::unlimited(), &mut |_, _| {})
}

pub(crate) type CofactorHook<'a, K> = dyn FnMut(&mut [Polynomial<K>; NVARS], u32) + 'a;

/// Reduction with a step meter and a hook that may replace the cofactors
/// by any other valid choice before they are differentiated.
pub(crate) fn reduce_with<K: Field>(
    form: &PoleForm<K>,
    ring: &JacobianRing<K>,
    basis: &GriffithsBasis,
    meter: &mut Meter,
    hook: &mut CofactorHook<'_, K>,
) -> Result<Vec<K>, ConnectionError> {
    let mut coords = vec![K::zero(); basis.len()];
    let mut q = form.numerator.clone();
    let mut k = form.pole_order;
    if let Some(d) = q.homogeneous_degree() {
        if d != form.expected_degree() {
            return Err(ConnectionError::DegreeMismatch { expected: form.expected_degree(), found: d });
        }
    } else if !q.is_zero() {
        return Err(ConnectionError::NotHomogeneous);
    }
    while !q.is_zero() {
        let (h, mut a) = ring.split_metered(&q, meter)?;
        for (m, c) in h.terms() {
            let Some(row) = basis.position(m, k) else {
                return Err(ConnectionError::NoStandardMonomial { monomial: m.to_string(), pole_order: k });
            };
            coords[row] = coords[row].plus(c);
        }
        if k == 1 {
            // degree-0 numerators are never in the ideal
            if a.iter().any(|ai| !ai.is_zero()) {
                return Err(ConnectionError::NoStandardMonomial { monomial: q.to_string(), pole_order: 1 });
            }
            break;
        }
        hook(&mut a, k);
        let mut next = Polynomial::zero();
        for (i, ai) in a.iter().enumerate() {
            next = next.add(&ai.partial_derivative(i));
        }
        q = next.scale(&K::from_i64(k as i64 - 1).inverse());
        k -= 1;
    }
    Ok(coords)
}

/// Budget-aware entry point used by the ODE oracle.
pub(crate) fn reduce_metered<K: Field>(
    form: &PoleForm<K>,
    ring: &JacobianRing<K>,
    basis: &GriffithsBasis,
    meter: &mut Meter,
) -> Result<Vec<K>, ConnectionError> {
    reduce_with(form, ring, basis, meter, &mut |_, _| {})
}

impl From<Exhausted> for ConnectionError {
    fn from(e: Exhausted) -> Self {
        ConnectionError::Budget(e)
    }
}
