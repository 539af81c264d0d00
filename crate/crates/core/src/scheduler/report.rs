use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::Edge;

use super::checkpoint::AttemptRecord;
use super::oracle::AttemptKind;
use super::search::{SearchResult, SearchStatus};
use super::tree::{extract_path, extract_tree};
use super::{SchedError, SearchProblem};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeCounts {
    pub success: usize,
    pub timeout: usize,
    pub failed: usize,
    pub faulted: usize,
}

impl OutcomeCounts {
    pub fn of(attempts: &[AttemptRecord]) -> Self {
        let mut c = OutcomeCounts::default();
        for a in attempts {
            match a.kind {
                AttemptKind::Success => c.success += 1,
                AttemptKind::Timeout => c.timeout += 1,
                AttemptKind::Failed => c.failed += 1,
                AttemptKind::Faulted => c.faulted += 1,
            }
        }
        c
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeTiming {
    pub edge: String,
    pub kind: AttemptKind,
    pub elapsed_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub status: SearchStatus,
    pub targets: Vec<String>,
    /// Accepted edges `G'`, in acceptance order.
    pub accepted: Vec<[String; 2]>,
    /// Pruned spanning tree `T`; empty unless the search succeeded.
    pub tree: Vec<[String; 2]>,
    /// Vertex names along `T` from the first target to each other target.
    pub paths: Vec<Vec<String>>,
    pub timings: Vec<EdgeTiming>,
    pub counts: OutcomeCounts,
    pub attempts: usize,
}

impl SearchReport {
    pub fn build(problem: &SearchProblem, result: &SearchResult) -> Result<Self, SchedError> {
        let pair = |e: &Edge| [problem.name(e.f), problem.name(e.g)];
        let accepted: Vec<Edge> = result.accepted.iter().map(|&i| problem.edges[i]).collect();
        let (tree, paths) = if result.status == SearchStatus::Success {
            let t = extract_tree(problem.vertices, &accepted, &problem.targets)?;
            let mut paths = Vec::new();
            if let Some((&from, rest)) = problem.targets.split_first() {
                for &to in rest {
                    let p = extract_path(&t, from, to)?;
                    paths.push(p.into_iter().map(|v| problem.name(v)).collect());
                }
            }
            (t, paths)
        } else {
            (Vec::new(), Vec::new())
        };
        Ok(SearchReport {
            status: result.status,
            targets: problem.targets.iter().map(|&v| problem.name(v)).collect(),
            accepted: accepted.iter().map(pair).collect(),
            tree: tree.iter().map(pair).collect(),
            paths,
            timings: result
                .attempts
                .iter()
                .map(|a| EdgeTiming { edge: a.edge.clone(), kind: a.kind, elapsed_s: a.elapsed_s })
                .collect(),
            counts: OutcomeCounts::of(&result.attempts),
            attempts: result.attempts.len(),
        })
    }
}

/// Histogram of successful edges per source vertex: entry `j` counts the
/// vertices with exactly `j` successes among their `per_vertex` chosen edges.
pub fn success_frequency(outcomes: &[(u32, bool)], per_vertex: usize) -> Vec<usize> {
    let mut by_vertex: BTreeMap<u32, usize> = BTreeMap::new();
    for &(f, ok) in outcomes {
        *by_vertex.entry(f).or_default() += ok as usize;
    }
    let mut hist = vec![0; per_vertex + 1];
    for s in by_vertex.into_values() {
        hist[s.min(per_vertex)] += 1;
    }
    hist
}
