use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::{format_rational, Q};
use crate::connection::{gm_connection_cached, ConnectionError, ConnectionMatrix, ConnectionMatrixJson, Pencil, RingCache};
use crate::store::{read_jsonl, write_jsonl, StoreError};

use super::pca::PcaModel;
use super::psi::{matrix_stats, psi, MatrixStats};
use super::vector::edge_vector;
use super::FeatureError;

/// Entrywise `psi` images of connection matrices, one channel per basepoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixChannels {
    pub size: usize,
    /// Each channel is `size x size`, row-major.
    pub channels: Vec<Vec<f64>>,
}

impl MatrixChannels {
    pub fn from_matrices(ms: &[ConnectionMatrix]) -> Self {
        let size = ms.first().map_or(0, |m| m.entries.rows());
        MatrixChannels { size, channels: ms.iter().map(|m| m.entries.data().iter().map(psi).collect()).collect() }
    }

    /// Channels concatenated, channel-major: the CNN input layout.
    pub fn flatten(&self) -> Vec<f64> {
        self.channels.concat()
    }
}

/// All model inputs for one edge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureRecord {
    pub edge: String,
    pub vector: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pca: Option<Vec<f64>>,
    pub channels: MatrixChannels,
    pub stats: MatrixStats,
    pub matrices: Vec<ConnectionMatrixJson>,
}

/// Assembles the record of `e` from its connection matrices at `basepoints`.
pub fn feature_record(
    edge: &str,
    e: &Pencil,
    matrices: &[ConnectionMatrix],
    basepoints: &[Q],
    pca: Option<&PcaModel>,
) -> Result<FeatureRecord, FeatureError> {
    let mut picked = Vec::with_capacity(basepoints.len());
    for t0 in basepoints {
        let m = matrices
            .iter()
            .find(|m| &m.t0 == t0)
            .ok_or_else(|| FeatureError::MissingBasepoint(format_rational(t0)))?;
        picked.push(m.clone());
    }
    let vector = edge_vector(e.f(), e.g());
    let pca = pca.map(|p| p.transform(&vector)).transpose()?;
    Ok(FeatureRecord {
        edge: edge.to_string(),
        pca,
        channels: MatrixChannels::from_matrices(&picked),
        stats: matrix_stats(picked.iter().flat_map(|m| m.entries.data())),
        matrices: picked.iter().map(ConnectionMatrix::to_json).collect(),
        vector,
    })
}

/// Computes the connection matrices of `e` at `basepoints` and the record.
pub fn compute_record(
    edge: &str,
    e: &Pencil,
    basepoints: &[Q],
    cache: &RingCache,
    pca: Option<&PcaModel>,
) -> Result<FeatureRecord, FeatureError> {
    let ms = basepoints
        .iter()
        .map(|t0| gm_connection_cached(e, t0, cache))
        .collect::<Result<Vec<_>, ConnectionError>>()?;
    feature_record(edge, e, &ms, basepoints, pca)
}

impl FeatureRecord {
    /// Rational matrices parsed back from their stored strings.
    pub fn connection_matrices(&self) -> Result<Vec<ConnectionMatrix>, FeatureError> {
        self.matrices.iter().map(|j| ConnectionMatrix::from_json(j).map_err(FeatureError::Stored)).collect()
    }
}

/// JSON-Lines feature file keyed by edge id.
pub fn write_features(path: &Path, header: Option<&serde_json::Value>, records: &[FeatureRecord]) -> Result<(), StoreError> {
    write_jsonl(path, header, records)
}

pub fn read_features(path: &Path) -> Result<BTreeMap<String, FeatureRecord>, StoreError> {
    Ok(read_jsonl::<FeatureRecord>(path)?.into_iter().map(|r| (r.edge.clone(), r)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{integer, parse_polynomial};

    fn pencil(f: &str, g: &str) -> Pencil {
        Pencil::new(parse_polynomial(f).unwrap(), parse_polynomial(g).unwrap()).unwrap()
    }

    fn basepoints() -> Vec<Q> {
        vec![integer(0), integer(1)]
    }

    #[test]
    fn trivial_pencil_has_zero_channels() {
        let e = pencil("x^4 + y^4 + z^4 + w^4", "x^4 + y^4 + z^4 + w^4");
        let r = compute_record("0-0", &e, &basepoints(), &RingCache::new(), None).unwrap();
        assert_eq!(r.channels.channels.len(), 2);
        assert_eq!(r.channels.size, 21);
        assert!(r.channels.flatten().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn stats_and_store_round_trip() {
        let e = pencil("x^4 + y^4 + z^4 + w^4", "x^3*y + x*y^3 + z^3*w + w^4");
        let r = compute_record("3-7", &e, &basepoints(), &RingCache::new(), None).unwrap();
        let ms = r.connection_matrices().unwrap();
        // recompute from the parsed rational matrices
        let stats = matrix_stats(ms.iter().flat_map(|m| m.entries.data()));
        assert_eq!(stats, r.stats);
        assert!(r.channels.flatten().iter().all(|&x| x >= 0.0));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("features.jsonl");
        write_features(&path, None, std::slice::from_ref(&r)).unwrap();
        let back = read_features(&path).unwrap();
        assert_eq!(back["3-7"], r);
        assert_eq!(back["3-7"].connection_matrices().unwrap(), ms);
    }

    #[test]
    fn missing_basepoint() {
        let e = pencil("x^4 + y^4 + z^4 + w^4", "x^3*y + x*y^3 + z^3*w + w^4");
        let ms = vec![gm_connection_cached(&e, &integer(0), &RingCache::new()).unwrap()];
        assert_eq!(
            feature_record("0-1", &e, &ms, &basepoints(), None),
            Err(FeatureError::MissingBasepoint("1".into()))
        );
    }
}
