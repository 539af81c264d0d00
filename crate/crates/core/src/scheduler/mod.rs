//! Edge scheduling: brute force with thresholding, the score-ordered
//! variant, checkpointed resume and tree extraction.

mod checkpoint;
mod oracle;
mod report;
mod search;
mod toy;
mod tree;

use std::path::PathBuf;
use std::time::Duration;

use petgraph::unionfind::UnionFind;

use crate::dataset::Edge;

pub use checkpoint::{load_checkpoint, AttemptRecord, Checkpoint};
pub use oracle::{
    attempt_edge, Attempt, AttemptKind, EdgeOracle, OracleReport, PencilOracle, SyntheticCost, SyntheticOracle,
    HARD_DEADLINE_FACTOR,
};
pub use report::{success_frequency, EdgeTiming, OutcomeCounts, SearchReport};
pub use search::{
    brute_force, informed_brute_force, informed_search_rounds, queue_order, resume, SearchOptions, SearchResult,
    SearchStatus,
};
pub use toy::{random_instance, toy_problem};
pub use tree::{extract_path, extract_tree};

#[derive(Debug, thiserror::Error)]
pub enum SchedError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("checkpoint line {line}: {reason}")]
    CorruptCheckpoint { line: usize, reason: String },
    #[error("vertex {vertex} is not connected to the other targets")]
    Disconnected { vertex: u32 },
    #[error("invalid search problem: {0}")]
    InvalidProblem(String),
}

/// Targets `V` and candidate edges `E` over the waypoints `W = 0..vertices`.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchProblem {
    pub vertices: usize,
    pub names: Option<Vec<String>>,
    pub targets: Vec<u32>,
    pub edges: Vec<Edge>,
    pub budget: Duration,
    /// One score per edge; higher means more likely to succeed.
    pub scores: Option<Vec<f64>>,
}

impl SearchProblem {
    pub fn new(vertices: usize, targets: Vec<u32>, edges: Vec<Edge>, budget: Duration) -> Self {
        SearchProblem { vertices, names: None, targets, edges, budget, scores: None }
    }

    pub fn with_scores(mut self, scores: Vec<f64>) -> Self {
        self.scores = Some(scores);
        self
    }

    pub fn name(&self, v: u32) -> String {
        self.names.as_ref().and_then(|n| n.get(v as usize).cloned()).unwrap_or_else(|| v.to_string())
    }

    pub fn validate(&self) -> Result<(), SchedError> {
        let bad = |m: String| Err(SchedError::InvalidProblem(m));
        let n = self.vertices as u32;
        if let Some(t) = self.targets.iter().find(|&&t| t >= n) {
            return bad(format!("target {t} outside the {n} waypoints"));
        }
        if let Some(e) = self.edges.iter().find(|e| e.f >= n || e.g >= n) {
            return bad(format!("edge {} leaves the {n} waypoints", e.id()));
        }
        if let Some(s) = &self.scores {
            if s.len() != self.edges.len() {
                return bad(format!("{} scores for {} edges", s.len(), self.edges.len()));
            }
            if s.iter().any(|x| x.is_nan()) {
                return bad("NaN score".into());
            }
        }
        if let Some(names) = &self.names {
            if names.len() != self.vertices {
                return bad(format!("{} names for {} waypoints", names.len(), self.vertices));
            }
        }
        if self.budget.is_zero() {
            return bad("zero budget".into());
        }
        Ok(())
    }
}

/// Union-find over `W` together with the accepted edges.
pub struct ForestState {
    uf: UnionFind<u32>,
    pub accepted: Vec<usize>,
}

impl ForestState {
    pub fn new(vertices: usize) -> Self {
        ForestState { uf: UnionFind::new(vertices), accepted: Vec::new() }
    }

    /// Rebuilds from logged attempts.
    pub fn replay(problem: &SearchProblem, log: &[AttemptRecord]) -> Self {
        let mut s = ForestState::new(problem.vertices);
        for r in log.iter().filter(|r| r.kind == AttemptKind::Success) {
            s.accept(problem, r.index);
        }
        s
    }

    pub fn accept(&mut self, problem: &SearchProblem, index: usize) {
        let e = problem.edges[index];
        self.uf.union(e.f, e.g);
        self.accepted.push(index);
    }

    pub fn connected(&self, a: u32, b: u32) -> bool {
        self.uf.equiv(a, b)
    }

    pub fn connects(&self, targets: &[u32]) -> bool {
        targets.windows(2).all(|w| self.uf.equiv(w[0], w[1]))
    }

    /// Number of components of `W`.
    pub fn components(&self) -> usize {
        let mut roots = self.uf.clone().into_labeling();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }
}

#[cfg(test)]
mod tests;
