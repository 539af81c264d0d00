use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::algebra::{Polynomial, Q};
use crate::jacobian::{GriffithsBasis, JacobianError, JacobianRing};

/// A Jacobian ring together with its Griffiths basis.
#[derive(Debug)]
pub struct CachedRing {
    pub ring: JacobianRing<Q>,
    pub basis: GriffithsBasis,
}

impl CachedRing {
    pub fn new(f: &Polynomial<Q>) -> Result<Self, JacobianError> {
        let ring = JacobianRing::new(f)?;
        let basis = ring.griffiths_basis();
        Ok(CachedRing { ring, basis })
    }
}

/// Jacobian rings keyed by quartic, shared across worker threads.
///
/// Two threads missing on the same key both compute the ring; the first
/// insertion wins.
#[derive(Debug, Default)]
pub struct RingCache {
    rings: RwLock<HashMap<Polynomial<Q>, Arc<CachedRing>>>,
}

impl RingCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, f: &Polynomial<Q>) -> Result<Arc<CachedRing>, JacobianError> {
        if let Some(hit) = self.rings.read().expect("ring cache poisoned").get(f) {
            return Ok(Arc::clone(hit));
        }
        let fresh = Arc::new(CachedRing::new(f)?);
        let mut map = self.rings.write().expect("ring cache poisoned");
        Ok(Arc::clone(map.entry(f.clone()).or_insert(fresh)))
    }

    pub fn len(&self) -> usize {
        self.rings.read().expect("ring cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
