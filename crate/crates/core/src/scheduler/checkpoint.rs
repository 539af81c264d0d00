use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::oracle::AttemptKind;
use super::{SchedError, SearchProblem};

/// One terminal attempt, as logged.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttemptRecord {
    pub seq: usize,
    pub edge: String,
    /// Position of the edge in the problem's edge list.
    pub index: usize,
    pub kind: AttemptKind,
    pub elapsed_s: f64,
    pub timestamp: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

pub(crate) fn now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

/// Append-only JSON-Lines attempt log.
#[derive(Debug)]
pub struct Checkpoint {
    path: PathBuf,
    file: File,
    fsync: bool,
}

impl Checkpoint {
    /// Opens for appending, writing `header` first when the file is new.
    pub fn open(path: impl Into<PathBuf>, header: Option<&serde_json::Value>, fsync: bool) -> Result<Self, SchedError> {
        let path = path.into();
        let io = |e| SchedError::Io { path: path.clone(), source: e };
        let fresh = std::fs::metadata(&path).map(|m| m.len() == 0).unwrap_or(true);
        let mut file = OpenOptions::new().create(true).append(true).open(&path).map_err(io)?;
        if let (true, Some(h)) = (fresh, header) {
            writeln!(file, "{h}").map_err(io)?;
        }
        Ok(Checkpoint { path, file, fsync })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Writes one record; returns once it has reached the file.
    pub fn append(&mut self, r: &AttemptRecord) -> Result<(), SchedError> {
        let io = |e| SchedError::Io { path: self.path.clone(), source: e };
        let line = serde_json::to_string(r).expect("attempt records serialize");
        writeln!(self.file, "{line}").map_err(io)?;
        self.file.flush().map_err(io)?;
        if self.fsync {
            self.file.sync_data().map_err(io)?;
        }
        Ok(())
    }
}

/// Reads and validates a log against `problem`. A missing file is empty.
pub fn load_checkpoint(path: &Path, problem: &SearchProblem) -> Result<Vec<AttemptRecord>, SchedError> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(SchedError::Io { path: path.to_path_buf(), source: e }),
    };
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| SchedError::Io { path: path.to_path_buf(), source: e })?;
        let corrupt = |reason: String| SchedError::CorruptCheckpoint { line: i + 1, reason };
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(&line).map_err(|e| corrupt(e.to_string()))?;
        if value.get("_meta").is_some() {
            continue;
        }
        let r: AttemptRecord = serde_json::from_value(value).map_err(|e| corrupt(e.to_string()))?;
        match problem.edges.get(r.index) {
            Some(e) if e.id() == r.edge => {}
            _ => return Err(corrupt(format!("edge {} is not edge #{} of the problem", r.edge, r.index))),
        }
        out.push(r);
    }
    Ok(out)
}
