use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::algebra::all_permutations;

use super::VertexSet;

/// Partition of a vertex set into `S_4` orbits. Orbit ids follow the order
/// of their representatives, which are the smallest member ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitTable {
    pub orbit_of: Vec<usize>,
    pub representatives: Vec<usize>,
}

impl OrbitTable {
    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.len()];
        for &o in &self.orbit_of {
            sizes[o] += 1;
        }
        sizes
    }

    /// Member ids of each orbit, ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.len()];
        for (id, &o) in self.orbit_of.iter().enumerate() {
            out[o].push(id);
        }
        out
    }
}

pub fn s4_orbits(v: &VertexSet) -> OrbitTable {
    let index: HashMap<_, usize> = v.members.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let perms = all_permutations();
    let mut orbit_of = vec![usize::MAX; v.len()];
    let mut representatives = Vec::new();
    for (id, f) in v.members.iter().enumerate() {
        if orbit_of[id] != usize::MAX {
            continue;
        }
        let o = representatives.len();
        representatives.push(id);
        for p in &perms {
            if let Some(&j) = index.get(&f.permute_variables(p)) {
                orbit_of[j] = o;
            }
        }
    }
    OrbitTable { orbit_of, representatives }
}
