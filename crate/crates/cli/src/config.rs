//! `key = value` configuration with `#` comments.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use gmplan_core::algebra::{format_rational, parse_rational, Q};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Serialize)]
pub struct Config {
    pub data_dir: PathBuf,
    pub budget_s: f64,
    pub pca_k: usize,
    #[serde(serialize_with = "ser_rationals")]
    pub basepoints: Vec<Q>,
    pub seed: u64,
    pub jobs: usize,
    pub retries: usize,
    pub fsync: bool,
    pub learning_rate: f64,
    pub lr_decay: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub init_scale: f64,
    pub mlp_widths: [usize; 3],
    /// Multiplier applied to matrix channels before the CNN.
    pub channel_scale: f64,
}

fn ser_rationals<S: serde::Serializer>(v: &[Q], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(format_rational))
}

impl Default for Config {
    fn default() -> Self {
        Config {
            data_dir: PathBuf::from("gmplan-data"),
            budget_s: 30.0,
            pca_k: 23,
            basepoints: vec![Q::from_integer(0.into()), Q::from_integer(1.into())],
            seed: 0,
            jobs: 1,
            retries: 0,
            fsync: false,
            learning_rate: 0.01,
            lr_decay: 0.0,
            epochs: 200,
            batch_size: 16,
            init_scale: 1.0,
            mlp_widths: [64, 64, 64],
            channel_scale: 0.05,
        }
    }
}

pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<T>().map_err(|e| anyhow::anyhow!("`{x}`: {e}")))
        .collect()
}

pub fn parse_basepoints(s: &str) -> Result<Vec<Q>> {
    let v = s
        .split(',')
        .map(|x| parse_rational(x.trim()).map_err(|e| anyhow::anyhow!("basepoint `{x}`: {e}")))
        .collect::<Result<Vec<_>>>()?;
    if v.is_empty() {
        bail!("no basepoints");
    }
    Ok(v)
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let mut c = Config::default();
        if let Some(p) = path {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
            for (n, raw) in text.lines().enumerate() {
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let Some((k, v)) = line.split_once('=') else {
                    bail!("{} line {}: expected `key = value`", p.display(), n + 1);
                };
                c.set(k.trim(), v.trim()).with_context(|| format!("{} line {}", p.display(), n + 1))?;
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        let num = |what: &str| -> Result<f64> { v.parse().with_context(|| format!("{what} must be a number")) };
        let int = |what: &str| -> Result<usize> { v.parse().with_context(|| format!("{what} must be an integer")) };
        match key {
            "data_dir" => self.data_dir = PathBuf::from(v),
            "budget_s" => self.budget_s = num(key)?,
            "pca_k" => self.pca_k = int(key)?,
            "basepoints" => self.basepoints = parse_basepoints(v)?,
            "seed" => self.seed = v.parse().context("seed must be an integer")?,
            "jobs" => self.jobs = int(key)?,
            "retries" => self.retries = int(key)?,
            "fsync" => self.fsync = v.parse().context("fsync must be true or false")?,
            "learning_rate" => self.learning_rate = num(key)?,
            "lr_decay" => self.lr_decay = num(key)?,
            "epochs" => self.epochs = int(key)?,
            "batch_size" => self.batch_size = int(key)?,
            "init_scale" => self.init_scale = num(key)?,
            "mlp_widths" => {
                let w: Vec<usize> = parse_list(v)?;
                self.mlp_widths = w.try_into().map_err(|_| anyhow::anyhow!("mlp_widths needs three widths"))?;
            }
            "channel_scale" => self.channel_scale = num(key)?,
            _ => bail!("unknown config key `{key}`"),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.budget_s > 0.0 && self.budget_s.is_finite()) {
            bail!("budget_s must be positive");
        }
        if self.pca_k == 0 || self.jobs == 0 || self.epochs == 0 || self.batch_size == 0 {
            bail!("pca_k, jobs, epochs and batch_size must be positive");
        }
        if !(self.learning_rate > 0.0) || self.lr_decay < 0.0 || !(self.init_scale > 0.0) {
            bail!("learning_rate and init_scale must be positive, lr_decay non-negative");
        }
        if self.mlp_widths.contains(&0) {
            bail!("mlp_widths must be positive");
        }
        Ok(())
    }

    /// Resolved values in key order.
    pub fn resolved(&self) -> BTreeMap<String, serde_json::Value> {
        match serde_json::to_value(self).expect("config serializes") {
            serde_json::Value::Object(m) => m.into_iter().collect(),
            _ => unreachable!(),
        }
    }

    pub fn hash(&self) -> String {
        let text = serde_json::to_string(&self.resolved()).expect("config serializes");
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_overrides_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("gm.conf");
        std::fs::write(&p, "# comment\nbudget_s = 5\nbasepoints = 0, 1/2\nmlp_widths = 8,8,8\n").unwrap();
        let c = Config::load(Some(&p)).unwrap();
        assert_eq!(c.budget_s, 5.0);
        assert_eq!(c.basepoints.len(), 2);
        assert_eq!(c.mlp_widths, [8, 8, 8]);
        assert_ne!(c.hash(), Config::default().hash());
    }

    #[test]
    fn bad_files_name_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("gm.conf");
        std::fs::write(&p, "seed = 1\ncolour = blue\n").unwrap();
        let e = format!("{:#}", Config::load(Some(&p)).unwrap_err());
        assert!(e.contains("line 2") && e.contains("colour"), "{e}");
        std::fs::write(&p, "budget_s = -1\n").unwrap();
        assert!(Config::load(Some(&p)).is_err());
    }
}
