use serde::{Deserialize, Serialize};

use crate::algebra::{
    format_rational, integer, parse_polynomial, parse_rational, pencil_polynomial, Field, Matrix, Polynomial,
    RationalFunction, Q,
};
use crate::jacobian::{is_smooth, JacobianError};

use super::cache::{CachedRing, RingCache};
use super::reduce::{griffiths_dwork_reduce, PoleForm};
use super::ConnectionError;

/// The family `(1 - t) f + t g`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pencil {
    f: Polynomial<Q>,
    g: Polynomial<Q>,
}

impl Pencil {
    /// Checks that both endpoints are smooth quartics.
    pub fn new(f: Polynomial<Q>, g: Polynomial<Q>) -> Result<Self, ConnectionError> {
        for (p, t0) in [(&f, 0), (&g, 1)] {
            if p.homogeneous_degree() != Some(4) || !is_smooth(p) {
                return Err(ConnectionError::SingularMember {
                    t0: t0.to_string(),
                    source: JacobianError::NotSmooth { leading_monomials: vec![] },
                });
            }
        }
        Ok(Pencil { f, g })
    }

    /// Skips the smoothness check, for endpoints already known to be smooth.
    pub fn from_smooth(f: Polynomial<Q>, g: Polynomial<Q>) -> Self {
        Pencil { f, g }
    }

    pub fn f(&self) -> &Polynomial<Q> {
        &self.f
    }

    pub fn g(&self) -> &Polynomial<Q> {
        &self.g
    }

    pub fn is_trivial(&self) -> bool {
        self.f == self.g
    }

    pub fn reversed(&self) -> Pencil {
        Pencil { f: self.g.clone(), g: self.f.clone() }
    }

    /// `g - f`, the t-derivative of every member.
    pub fn direction(&self) -> Polynomial<Q> {
        self.g.sub(&self.f)
    }

    pub fn member(&self, t0: &Q) -> Polynomial<Q> {
        self.f.scale(&integer(1).minus(t0)).add(&self.g.scale(t0))
    }

    pub fn generic_member(&self) -> Polynomial<RationalFunction> {
        pencil_polynomial(&self.f, &self.g)
    }
}

/// First-order Gauss-Manin matrix of a pencil at `t0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionMatrix {
    pub pencil: Pencil,
    pub t0: Q,
    pub entries: Matrix<Q>,
}

/// Serialized form: polynomials and rationals as strings, entries row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectionMatrixJson {
    pub f: String,
    pub g: String,
    pub t0: String,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<String>,
}

impl ConnectionMatrix {
    pub fn to_json(&self) -> ConnectionMatrixJson {
        ConnectionMatrixJson {
            f: self.pencil.f.to_string(),
            g: self.pencil.g.to_string(),
            t0: format_rational(&self.t0),
            rows: self.entries.rows(),
            cols: self.entries.cols(),
            entries: self.entries.data().iter().map(format_rational).collect(),
        }
    }

    pub fn from_json(j: &ConnectionMatrixJson) -> Result<Self, String> {
        let f = parse_polynomial(&j.f).map_err(|e| e.to_string())?;
        let g = parse_polynomial(&j.g).map_err(|e| e.to_string())?;
        let t0 = parse_rational(&j.t0).map_err(|e| e.to_string())?;
        if j.entries.len() != j.rows * j.cols {
            return Err(format!("expected {} entries, found {}", j.rows * j.cols, j.entries.len()));
        }
        let data = j.entries.iter().map(|s| parse_rational(s).map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
        Ok(ConnectionMatrix {
            pencil: Pencil::from_smooth(f, g),
            t0,
            entries: Matrix::from_row_major(j.rows, j.cols, data),
        })
    }
}

/// Gauss-Manin matrix at `t0`, computing the Jacobian ring of `f_{t0}` afresh.
pub fn gm_connection_at(e: &Pencil, t0: &Q) -> Result<ConnectionMatrix, ConnectionError> {
    let member = e.member(t0);
    let ring = CachedRing::new(&member)
        .map_err(|source| ConnectionError::SingularMember { t0: format_rational(t0), source })?;
    gm_with_ring(e, t0, &ring)
}

/// Gauss-Manin matrix at `t0`, sharing Jacobian rings through `cache`.
pub fn gm_connection_cached(e: &Pencil, t0: &Q, cache: &RingCache) -> Result<ConnectionMatrix, ConnectionError> {
    let ring = cache
        .get(&e.member(t0))
        .map_err(|source| ConnectionError::SingularMember { t0: format_rational(t0), source })?;
    gm_with_ring(e, t0, &ring)
}

fn gm_with_ring(e: &Pencil, t0: &Q, cached: &CachedRing) -> Result<ConnectionMatrix, ConnectionError> {
    let dir = e.direction();
    let n = cached.basis.len();
    let mut entries = Matrix::zeros(n, n);
    if !dir.is_zero() {
        for (i, row) in cached.basis.rows().iter().enumerate() {
            let k = row.pole_order;
            let numerator = dir.mul_term(&integer(-(k as i64)), &row.monomial);
            let coords = griffiths_dwork_reduce(&PoleForm::new(numerator, k + 1), &cached.ring, &cached.basis)?;
            for (j, c) in coords.into_iter().enumerate() {
                entries.set(i, j, c);
            }
        }
    }
    Ok(ConnectionMatrix { pencil: e.clone(), t0: t0.clone(), entries })
}
