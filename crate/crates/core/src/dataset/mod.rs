//! Fewnomial vertex sets, `S_4` orbits, edge sets, splits and class balancing.

mod edges;
mod enumerate;
mod orbits;
mod split;

pub use edges::{build_edges, edge_id, parse_edge_id, smooth_extensions, Edge, EdgePolicy, EdgeSet, PolicyTag};
pub use enumerate::{enumerate_fewnomials, passes_prefilter, VertexSet};
pub use orbits::{s4_orbits, OrbitTable};
pub use split::{balance_oversample, split, SplitSpec};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DatasetError {
    #[error("term count {0} outside 1..=35")]
    TermCount(usize),
    #[error("unknown edge policy `{0}`")]
    UnknownPolicy(String),
    #[error("malformed edge id `{0}`")]
    EdgeId(String),
    #[error("vertex id {id} out of range for {len} vertices")]
    VertexOutOfRange { id: usize, len: usize },
    #[error("split fraction {0} outside (0, 1)")]
    Alpha(f64),
    #[error("cannot balance a single-class training set")]
    SingleClass,
}
