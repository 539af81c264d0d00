//! JSON-Lines files shared by the vertex, edge, feature and checkpoint stores.
//!
//! A line whose object has a `_meta` key is a provenance header; readers
//! skip it.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path} line {line}: {source}")]
    Parse { path: PathBuf, line: usize, source: serde_json::Error },
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io { path: path.to_path_buf(), source }
}

/// Writes `rows` after an optional header, replacing the file atomically.
pub fn write_jsonl<T: Serialize>(
    path: &Path,
    header: Option<&serde_json::Value>,
    rows: impl IntoIterator<Item = T>,
) -> Result<(), StoreError> {
    let err = io_err(path);
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(&err)?;
    }
    let tmp = path.with_extension("tmp");
    {
        let mut out = BufWriter::new(File::create(&tmp).map_err(&err)?);
        if let Some(h) = header {
            writeln!(out, "{h}").map_err(&err)?;
        }
        for row in rows {
            serde_json::to_writer(&mut out, &row).expect("store rows serialize");
            out.write_all(b"\n").map_err(&err)?;
        }
        out.into_inner().map_err(|e| err(e.into_error()))?.sync_all().map_err(&err)?;
    }
    fs::rename(&tmp, path).map_err(&err)
}

/// All non-header rows in file order.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, StoreError> {
    Ok(read_jsonl_with_meta(path)?.1)
}

/// Header lines and rows, in file order.
pub fn read_jsonl_with_meta<T: DeserializeOwned>(path: &Path) -> Result<(Vec<serde_json::Value>, Vec<T>), StoreError> {
    let err = io_err(path);
    let file = File::open(path).map_err(&err)?;
    let mut meta = Vec::new();
    let mut rows = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(&err)?;
        if line.trim().is_empty() {
            continue;
        }
        let parse = |source| StoreError::Parse { path: path.to_path_buf(), line: i + 1, source };
        let value: serde_json::Value = serde_json::from_str(&line).map_err(parse)?;
        if value.get("_meta").is_some() {
            meta.push(value);
        } else {
            rows.push(serde_json::from_value(value).map_err(parse)?);
        }
    }
    Ok((meta, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Debug, PartialEq, Serialize, Deserialize)]
    struct Row {
        id: usize,
        name: String,
    }

    #[test]
    fn round_trip_skips_headers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub/rows.jsonl");
        let rows = vec![Row { id: 0, name: "a".into() }, Row { id: 1, name: "b".into() }];
        let header = serde_json::json!({"_meta": {"command": "test"}});
        write_jsonl(&path, Some(&header), &rows).unwrap();
        let (meta, back): (_, Vec<Row>) = read_jsonl_with_meta(&path).unwrap();
        assert_eq!(back, rows);
        assert_eq!(meta, vec![header]);
    }

    #[test]
    fn bad_line_reports_its_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rows.jsonl");
        fs::write(&path, "{\"id\":0,\"name\":\"a\"}\n{oops\n").unwrap();
        match read_jsonl::<Row>(&path) {
            Err(StoreError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }
}
