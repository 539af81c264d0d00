use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{integer, Monomial, Polynomial, Q};
use crate::jacobian::{is_smooth, QUARTIC_DEGREE};

use super::DatasetError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyTag {
    Complete,
    MonomialDifference,
    Custom,
}

impl FromStr for PolicyTag {
    type Err = DatasetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "complete" => Ok(PolicyTag::Complete),
            "monomial-difference" => Ok(PolicyTag::MonomialDifference),
            "custom" => Ok(PolicyTag::Custom),
            other => Err(DatasetError::UnknownPolicy(other.to_string())),
        }
    }
}

impl fmt::Display for PolicyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolicyTag::Complete => "complete",
            PolicyTag::MonomialDifference => "monomial-difference",
            PolicyTag::Custom => "custom",
        })
    }
}

/// How to connect a vertex list `W`.
#[derive(Clone, Debug)]
pub enum EdgePolicy<'a> {
    /// All unordered pairs `i < j` of `W`.
    Complete,
    /// Pairs `(i, j)` with `i` in `W`, `j` in `companions`, and supports
    /// differing by exactly one monomial.
    MonomialDifference { companions: &'a [Polynomial<Q>] },
    /// Explicit pairs of ids into `W`.
    Custom(Vec<(usize, usize)>),
}

impl EdgePolicy<'_> {
    pub fn tag(&self) -> PolicyTag {
        match self {
            EdgePolicy::Complete => PolicyTag::Complete,
            EdgePolicy::MonomialDifference { .. } => PolicyTag::MonomialDifference,
            EdgePolicy::Custom(_) => PolicyTag::Custom,
        }
    }
}

/// Ids of the endpoints. Under the monomial-difference policy `g` indexes
/// the companion set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub f: u32,
    pub g: u32,
}

impl Edge {
    pub fn new(f: usize, g: usize) -> Self {
        Edge { f: f as u32, g: g as u32 }
    }

    pub fn id(&self) -> String {
        edge_id(self.f as usize, self.g as usize)
    }
}

pub fn edge_id(f: usize, g: usize) -> String {
    format!("{f}-{g}")
}

pub fn parse_edge_id(s: &str) -> Result<Edge, DatasetError> {
    let bad = || DatasetError::EdgeId(s.to_string());
    let (a, b) = s.split_once('-').ok_or_else(bad)?;
    Ok(Edge::new(a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSet {
    pub policy: PolicyTag,
    pub edges: Vec<Edge>,
}

impl EdgeSet {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

fn support_key(f: &Polynomial<Q>) -> Vec<Monomial> {
    let mut s: Vec<Monomial> = f.support().copied().collect();
    s.sort();
    s
}

/// True when the supports differ by exactly one monomial.
fn differ_by_one_monomial(a: &[Monomial], b: &[Monomial]) -> bool {
    let (mut i, mut j, mut diff) = (0, 0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) if x == y => {
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x < y => {
                diff += 1;
                i += 1;
            }
            (Some(_), None) => {
                diff += 1;
                i += 1;
            }
            _ => {
                diff += 1;
                j += 1;
            }
        }
        if diff > 1 {
            return false;
        }
    }
    diff == 1
}

pub fn build_edges(w: &[Polynomial<Q>], policy: &EdgePolicy<'_>) -> Result<EdgeSet, DatasetError> {
    let n = w.len();
    let edges = match policy {
        EdgePolicy::Complete => {
            let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
            for i in 0..n {
                for j in i + 1..n {
                    out.push(Edge::new(i, j));
                }
            }
            out
        }
        EdgePolicy::MonomialDifference { companions } => {
            let left: Vec<_> = w.iter().map(support_key).collect();
            let right: Vec<_> = companions.iter().map(support_key).collect();
            left.par_iter()
                .enumerate()
                .flat_map_iter(|(i, a)| {
                    right.iter().enumerate().filter(|(_, b)| differ_by_one_monomial(a, b)).map(move |(j, _)| Edge::new(i, j))
                })
                .collect()
        }
        EdgePolicy::Custom(pairs) => {
            let mut out = Vec::with_capacity(pairs.len());
            for &(i, j) in pairs {
                for id in [i, j] {
                    if id >= n {
                        return Err(DatasetError::VertexOutOfRange { id, len: n });
                    }
                }
                out.push(Edge::new(i, j));
            }
            out
        }
    };
    Ok(EdgeSet { policy: policy.tag(), edges })
}

/// Smooth quartics `f + m` for monomials `m` outside the support of `f`,
/// in canonical order. These are the companions of `f` one term up.
pub fn smooth_extensions(f: &Polynomial<Q>) -> Vec<Polynomial<Q>> {
    let mut out: Vec<Polynomial<Q>> = Monomial::all_of_degree(QUARTIC_DEGREE)
        .into_iter()
        .filter(|m| f.coeff(m) == integer(0))
        .map(|m| f.add(&Polynomial::term(integer(1), m)))
        .filter(is_smooth)
        .collect();
    out.sort_by_key(|g| g.to_string());
    out
}
