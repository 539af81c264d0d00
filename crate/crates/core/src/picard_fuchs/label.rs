use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::budget::{Budget, Meter};
use crate::connection::Pencil;

use super::ode::{first_ode_with, Outcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    Timeout,
    SingularFamily,
    Fault,
}

/// Ground-truth label of one edge. `success` is the positive class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeLabel {
    pub edge: String,
    pub elapsed_s: f64,
    pub success: bool,
    pub order: Option<usize>,
    pub degree: Option<usize>,
    pub host: String,
    pub timestamp: f64,
    pub budget_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<FailureKind>,
}

impl EdgeLabel {
    pub fn from_outcome(edge: &str, outcome: &Outcome, budget: &Budget) -> Self {
        let (success, order, degree, failure) = match outcome {
            Outcome::Success { operator, .. } => (true, Some(operator.order()), Some(operator.degree()), None),
            Outcome::Timeout { .. } => (false, None, None, Some(FailureKind::Timeout)),
            Outcome::SingularFamily { .. } => (false, None, None, Some(FailureKind::SingularFamily)),
        };
        EdgeLabel {
            edge: edge.to_string(),
            elapsed_s: outcome.elapsed().as_secs_f64(),
            success,
            order,
            degree,
            host: host_tag(),
            timestamp: now(),
            budget_s: budget.wall_clock.as_secs_f64(),
            failure,
        }
    }

    /// A failed label for a job that crashed or never reported.
    pub fn fault(edge: &str, elapsed_s: f64, budget: &Budget) -> Self {
        EdgeLabel {
            edge: edge.to_string(),
            elapsed_s,
            success: false,
            order: None,
            degree: None,
            host: host_tag(),
            timestamp: now(),
            budget_s: budget.wall_clock.as_secs_f64(),
            failure: Some(FailureKind::Fault),
        }
    }
}

/// Runs the first-ODE oracle on `e` under `budget`.
pub fn label_edge(edge: &str, e: &Pencil, budget: &Budget) -> EdgeLabel {
    let outcome = first_ode_with(e, &mut Meter::new(budget));
    EdgeLabel::from_outcome(edge, &outcome, budget)
}

fn now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

/// Labeling host: `$GMPLAN_HOST`, else the system hostname.
pub fn host_tag() -> String {
    if let Ok(h) = std::env::var("GMPLAN_HOST") {
        if !h.is_empty() {
            return h;
        }
    }
    fs::read_to_string("/etc/hostname")
        .ok()
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "unknown".to_string())
}

#[derive(Debug, thiserror::Error)]
pub enum LabelStoreError {
    #[error("label store {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("label store {path} line {line}: {source}")]
    Parse { path: PathBuf, line: usize, source: serde_json::Error },
}

/// Append-only JSON-Lines label file. Readers keep the newest label per
/// edge; [`compact`](Self::compact) drops the superseded lines.
///
/// Lines carrying a `_meta` key are provenance headers and are skipped.
#[derive(Debug)]
pub struct LabelStore {
    path: PathBuf,
    writer: Mutex<()>,
}

impl LabelStore {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        LabelStore { path: path.into(), writer: Mutex::new(()) }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn io(&self, source: std::io::Error) -> LabelStoreError {
        LabelStoreError::Io { path: self.path.clone(), source }
    }

    /// Appends one raw JSON line, e.g. a provenance header.
    pub fn append_raw(&self, value: &serde_json::Value) -> Result<(), LabelStoreError> {
        let _guard = self.writer.lock().expect("label store writer poisoned");
        let mut file = OpenOptions::new().create(true).append(true).open(&self.path).map_err(|e| self.io(e))?;
        writeln!(file, "{value}").map_err(|e| self.io(e))
    }

    pub fn record(&self, label: &EdgeLabel) -> Result<(), LabelStoreError> {
        self.append_raw(&serde_json::to_value(label).expect("labels serialize"))
    }

    /// Every label line in file order; a missing file is empty.
    pub fn load_all(&self) -> Result<Vec<EdgeLabel>, LabelStoreError> {
        Ok(self.read_lines()?.1)
    }

    #[allow(clippy::type_complexity)]
    fn read_lines(&self) -> Result<(Vec<serde_json::Value>, Vec<EdgeLabel>), LabelStoreError> {
        let file = match File::open(&self.path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok((vec![], vec![])),
            Err(e) => return Err(self.io(e)),
        };
        let mut meta = Vec::new();
        let mut labels = Vec::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| self.io(e))?;
            if line.trim().is_empty() {
                continue;
            }
            let parse = |source| LabelStoreError::Parse { path: self.path.clone(), line: i + 1, source };
            let value: serde_json::Value = serde_json::from_str(&line).map_err(parse)?;
            if value.get("_meta").is_some() {
                meta.push(value);
            } else {
                labels.push(serde_json::from_value(value).map_err(parse)?);
            }
        }
        Ok((meta, labels))
    }

    /// Newest label per edge (by timestamp, later lines win ties).
    pub fn latest(&self) -> Result<BTreeMap<String, EdgeLabel>, LabelStoreError> {
        let mut out: BTreeMap<String, EdgeLabel> = BTreeMap::new();
        for label in self.load_all()? {
            match out.get(&label.edge) {
                Some(old) if old.timestamp > label.timestamp => {}
                _ => {
                    out.insert(label.edge.clone(), label);
                }
            }
        }
        Ok(out)
    }

    /// Rewrites the file with the first header line and one label per edge.
    /// Returns the number of label lines removed.
    pub fn compact(&self) -> Result<usize, LabelStoreError> {
        let _guard = self.writer.lock().expect("label store writer poisoned");
        let (meta, all) = self.read_lines()?;
        let before = all.len();
        let mut latest: BTreeMap<String, EdgeLabel> = BTreeMap::new();
        for label in all {
            match latest.get(&label.edge) {
                Some(old) if old.timestamp > label.timestamp => {}
                _ => {
                    latest.insert(label.edge.clone(), label);
                }
            }
        }
        let tmp = self.path.with_extension("jsonl.tmp");
        {
            let mut out = File::create(&tmp).map_err(|e| self.io(e))?;
            if let Some(m) = meta.first() {
                writeln!(out, "{m}").map_err(|e| self.io(e))?;
            }
            for label in latest.values() {
                writeln!(out, "{}", serde_json::to_string(label).expect("labels serialize")).map_err(|e| self.io(e))?;
            }
            out.sync_all().map_err(|e| self.io(e))?;
        }
        fs::rename(&tmp, &self.path).map_err(|e| self.io(e))?;
        Ok(before - latest.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_polynomial;

    fn trivial() -> Pencil {
        let f = parse_polynomial("x^4 + y^4 + z^4 + w^4").unwrap();
        Pencil::new(f.clone(), f).unwrap()
    }

    #[test]
    fn trivial_edge_labels_as_success() {
        let label = label_edge("0-0", &trivial(), &Budget::seconds(30.0));
        assert!(label.success);
        assert_eq!(label.order, Some(1));
        assert_eq!(label.degree, Some(0));
        assert_eq!(label.failure, None);
        assert!(label.elapsed_s < 1.0);
        assert_eq!(label.budget_s, 30.0);
    }

    #[test]
    fn timeouts_record_the_failure_kind() {
        let e = Pencil::new(
            parse_polynomial("x^4 + y^4 + z^4 + w^4").unwrap(),
            parse_polynomial("x^3*y + y^4 + z^3*w + w^4").unwrap(),
        )
        .unwrap();
        let label = label_edge("0-1", &e, &Budget::seconds(0.001));
        assert!(!label.success);
        assert_eq!(label.failure, Some(FailureKind::Timeout));
        assert!(label.order.is_none() && label.degree.is_none());
    }

    #[test]
    fn store_keeps_newest_label_and_compacts() {
        let dir = tempfile::tempdir().unwrap();
        let store = LabelStore::new(dir.path().join("labels.jsonl"));
        assert!(store.latest().unwrap().is_empty());
        store.append_raw(&serde_json::json!({"_meta": {"command": "label"}})).unwrap();
        let budget = Budget::seconds(30.0);
        let mut a = EdgeLabel::fault("3-4", 30.5, &budget);
        a.timestamp = 10.0;
        let mut b = label_edge("3-4", &trivial(), &budget);
        b.timestamp = 20.0;
        let mut c = EdgeLabel::fault("5-6", 1.0, &budget);
        c.timestamp = 15.0;
        for l in [&a, &b, &c] {
            store.record(l).unwrap();
        }
        let latest = store.latest().unwrap();
        assert_eq!(latest.len(), 2);
        assert_eq!(latest["3-4"], b);
        assert_eq!(store.compact().unwrap(), 1);
        assert_eq!(store.load_all().unwrap().len(), 2);
        assert_eq!(store.latest().unwrap(), latest);
        let text = fs::read_to_string(store.path()).unwrap();
        assert!(text.lines().next().unwrap().contains("_meta"));
    }
}
