use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{integer, parse_polynomial, Monomial, ParseError, Polynomial, NVARS, Q};
use crate::jacobian::{is_smooth, QUARTIC_DEGREE};

use super::DatasetError;

/// Smooth quartics that are sums of `k` distinct monomials, sorted by their
/// canonical strings. A member's id is its index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexSet {
    pub k: usize,
    pub members: Vec<Polynomial<Q>>,
}

#[derive(Serialize, Deserialize)]
struct VertexRow {
    id: usize,
    poly: String,
}

impl VertexSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn get(&self, id: usize) -> Option<&Polynomial<Q>> {
        self.members.get(id)
    }

    /// Id of a member, by canonical string.
    pub fn position(&self, f: &Polynomial<Q>) -> Option<usize> {
        let key = f.to_string();
        self.members.binary_search_by(|m| m.to_string().cmp(&key)).ok()
    }

    /// Rows for the vertex store.
    pub fn rows(&self) -> impl Iterator<Item = serde_json::Value> + '_ {
        self.members
            .iter()
            .enumerate()
            .map(|(id, f)| serde_json::to_value(VertexRow { id, poly: f.to_string() }).unwrap())
    }

    /// Rebuilds from store rows; rows must be in id order.
    pub fn from_rows(k: usize, rows: &[serde_json::Value]) -> Result<Self, ParseError> {
        let mut members = Vec::with_capacity(rows.len());
        for row in rows {
            let poly = row.get("poly").and_then(|p| p.as_str()).unwrap_or_default();
            members.push(parse_polynomial(poly)?);
        }
        Ok(VertexSet { k, members })
    }
}

/// Necessary condition for smoothness: each variable occurs with exponent at
/// least 3 somewhere, otherwise the coordinate point of that variable is
/// singular.
pub fn passes_prefilter(monomials: &[Monomial]) -> bool {
    (0..NVARS).all(|i| monomials.iter().any(|m| m.exp(i) >= 3))
}

/// All smooth `k`-nomial quartics with unit coefficients.
pub fn enumerate_fewnomials(k: usize) -> Result<VertexSet, DatasetError> {
    let monos = Monomial::all_of_degree(QUARTIC_DEGREE);
    if k == 0 || k > monos.len() {
        return Err(DatasetError::TermCount(k));
    }
    let mut members: Vec<(String, Polynomial<Q>)> = monos
        .iter()
        .copied()
        .combinations(k)
        .par_bridge()
        .filter(|subset| passes_prefilter(subset))
        .filter_map(|subset| {
            let f = Polynomial::from_terms(subset.into_iter().map(|m| (m, integer(1))));
            is_smooth(&f).then(|| (f.to_string(), f))
        })
        .collect();
    members.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(VertexSet { k, members: members.into_iter().map(|(_, f)| f).collect() })
}
