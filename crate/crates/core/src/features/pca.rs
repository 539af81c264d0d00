use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::FeatureError;

/// Principal components of a point cloud. `components` is `k x dim`,
/// row-major; `singular_values` holds the full descending spectrum of the
/// centered data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub dim: usize,
    pub k: usize,
    pub mean: Vec<f64>,
    pub components: Vec<f64>,
    pub singular_values: Vec<f64>,
}

impl PcaModel {
    pub fn component(&self, i: usize) -> &[f64] {
        &self.components[i * self.dim..(i + 1) * self.dim]
    }

    /// Share of the total variance carried by each retained component.
    pub fn explained_variance_ratio(&self) -> Vec<f64> {
        let total: f64 = self.singular_values.iter().map(|s| s * s).sum();
        self.singular_values[..self.k]
            .iter()
            .map(|s| if total > 0.0 { s * s / total } else { 0.0 })
            .collect()
    }

    pub fn transform(&self, v: &[f64]) -> Result<Vec<f64>, FeatureError> {
        if v.len() != self.dim {
            return Err(FeatureError::Dimension { expected: self.dim, found: v.len() });
        }
        Ok((0..self.k)
            .map(|i| self.component(i).iter().zip(v).zip(&self.mean).map(|((c, x), m)| c * (x - m)).sum())
            .collect())
    }

    /// Maps a score vector back to the ambient space.
    pub fn inverse_transform(&self, z: &[f64]) -> Vec<f64> {
        let mut out = self.mean.clone();
        for (i, zi) in z.iter().enumerate() {
            for (o, c) in out.iter_mut().zip(self.component(i)) {
                *o += zi * c;
            }
        }
        out
    }
}

/// Fits the top `k` right singular vectors of the centered data.
pub fn pca_fit(rows: &[Vec<f64>], k: usize) -> Result<PcaModel, FeatureError> {
    let n = rows.len();
    let dim = rows.first().map_or(0, Vec::len);
    if k == 0 || n < k || k > dim {
        return Err(FeatureError::PcaRank { n, dim, k });
    }
    if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
        return Err(FeatureError::Dimension { expected: dim, found: bad.len() });
    }
    let mut mean = vec![0.0; dim];
    for r in rows {
        for (m, x) in mean.iter_mut().zip(r) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let centered = DMatrix::from_fn(n, dim, |i, j| rows[i][j] - mean[j]);
    let svd = centered.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]).then(a.cmp(&b)));
    let mut components = Vec::with_capacity(k * dim);
    for &i in order.iter().take(k) {
        let mut row: Vec<f64> = v_t.row(i).iter().copied().collect();
        // fix the sign so the largest entry is positive
        let lead = row.iter().copied().fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        if lead < 0.0 {
            row.iter_mut().for_each(|x| *x = -*x);
        }
        components.extend(row);
    }
    let singular_values = order.iter().map(|&i| svd.singular_values[i]).collect();
    Ok(PcaModel { dim, k, mean, components, singular_values })
}
