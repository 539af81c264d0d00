use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use gmplan_core::algebra::{parse_polynomial, Polynomial, Q};
use gmplan_core::connection::Pencil;
use gmplan_core::dataset::{parse_edge_id, Edge};
use gmplan_core::store::{read_jsonl, write_jsonl};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::Config;

pub struct Ctx {
    pub config: Config,
    pub args: Vec<String>,
}

impl Ctx {
    pub fn new(config: Config, args: Vec<String>) -> Self {
        Ctx { config, args }
    }

    /// `path`, or `default` inside the store directory.
    pub fn path(&self, path: Option<&PathBuf>, default: &str) -> PathBuf {
        path.cloned().unwrap_or_else(|| self.config.data_dir.join(default))
    }

    /// Provenance of every output: command line, config and version.
    pub fn meta(&self) -> Value {
        json!({
            "command": self.args.join(" "),
            "config_hash": self.config.hash(),
            "config": self.config.resolved(),
            "version": env!("CARGO_PKG_VERSION"),
        })
    }

    pub fn header(&self) -> Value {
        json!({ "_meta": self.meta() })
    }

    pub fn write_rows<T: Serialize>(&self, path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
        write_jsonl(path, Some(&self.header()), rows).with_context(|| format!("writing {}", path.display()))
    }

    /// Writes `value` with a `_meta` field added.
    pub fn write_json<T: Serialize>(&self, path: &Path, value: &T) -> Result<()> {
        let mut v = serde_json::to_value(value)?;
        if let Value::Object(m) = &mut v {
            m.insert("_meta".into(), self.meta());
        }
        create_parent(path)?;
        std::fs::write(path, serde_json::to_string_pretty(&v)? + "\n")
            .with_context(|| format!("writing {}", path.display()))
    }

    /// Writes CSV text after a `# _meta` comment line.
    pub fn write_csv(&self, path: &Path, csv: &str) -> Result<()> {
        create_parent(path)?;
        std::fs::write(path, format!("# _meta {}\n{csv}", self.meta()))
            .with_context(|| format!("writing {}", path.display()))
    }
}

pub fn create_parent(path: &Path) -> Result<()> {
    if let Some(d) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
    }
    Ok(())
}

pub fn read_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    read_jsonl(path).with_context(|| format!("reading {} (run the producing command first?)", path.display()))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {} (run the producing command first?)", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn polynomial(s: &str) -> Result<Polynomial<Q>> {
    parse_polynomial(s).map_err(|e| anyhow::anyhow!("polynomial `{s}`: {e}"))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VertexRow {
    pub id: usize,
    pub poly: String,
}

/// One candidate edge with both endpoint polynomials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeRow {
    pub id: String,
    pub f: u32,
    pub g: u32,
    pub f_poly: String,
    pub g_poly: String,
}

impl EdgeRow {
    pub fn edge(&self) -> Edge {
        Edge { f: self.f, g: self.g }
    }

    pub fn pencil(&self) -> Result<Pencil> {
        Ok(Pencil::from_smooth(polynomial(&self.f_poly)?, polynomial(&self.g_poly)?))
    }
}

pub fn read_edges(path: &Path) -> Result<Vec<EdgeRow>> {
    let rows: Vec<EdgeRow> = read_rows(path)?;
    for r in &rows {
        let e = parse_edge_id(&r.id).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        anyhow::ensure!(e == r.edge(), "{}: edge id {} disagrees with its endpoints", path.display(), r.id);
    }
    Ok(rows)
}

pub fn read_vertices(path: &Path) -> Result<Vec<Polynomial<Q>>> {
    read_rows::<VertexRow>(path)?.iter().map(|r| polynomial(&r.poly)).collect()
}
