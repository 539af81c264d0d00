//! Model inputs: rational heights, matrix statistics, coefficient vectors,
//! PCA and height images of connection matrices.

mod pca;
mod psi;
mod record;
mod vector;

pub use pca::{pca_fit, PcaModel};
pub use psi::{matrix_stats, psi, psi_entropy, MatrixStats};
pub use record::{compute_record, feature_record, read_features, write_features, FeatureRecord, MatrixChannels};
pub use vector::{coefficient_vector, edge_vector, EDGE_VECTOR_DIM};

use crate::connection::ConnectionError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FeatureError {
    #[error("expected a vector of length {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("cannot fit {k} components to {n} samples of dimension {dim}")]
    PcaRank { n: usize, dim: usize, k: usize },
    #[error("no connection matrix at basepoint {0}")]
    MissingBasepoint(String),
    #[error("stored matrix: {0}")]
    Stored(String),
    #[error(transparent)]
    Connection(#[from] ConnectionError),
}
