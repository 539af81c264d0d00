use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use anyhow::{Context, Result};
use clap::Args;
use gmplan_core::algebra::format_rational;
use gmplan_core::budget::Budget;
use gmplan_core::connection::RingCache;
use gmplan_core::features::{compute_record, edge_vector, pca_fit, read_features, write_features, FeatureRecord};
use gmplan_core::picard_fuchs::{label_edge, EdgeLabel, LabelStore};
use rayon::prelude::*;

use crate::config::parse_basepoints;
use crate::stores::{polynomial, read_edges, Ctx, EdgeRow};

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().context("building worker pool")
}

#[derive(Args, Debug)]
pub struct GmArgs {
    #[arg(long)]
    edges: PathBuf,
    /// Comma-separated rational basepoints; defaults to the config.
    #[arg(long)]
    basepoints: Option<String>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn gm(ctx: &Ctx, a: GmArgs) -> Result<u8> {
    let basepoints = match &a.basepoints {
        Some(s) => parse_basepoints(s)?,
        None => ctx.config.basepoints.clone(),
    };
    let rows = read_edges(&a.edges)?;
    let out = ctx.path(a.out.as_ref(), "features.jsonl");
    let mut done: BTreeMap<String, FeatureRecord> = if out.exists() { read_features(&out)? } else { BTreeMap::new() };
    done.retain(|_, r| r.matrices.len() == basepoints.len() && r.matrices.iter().zip(&basepoints).all(|(m, t)| m.t0 == format_rational(t)));
    let todo: Vec<&EdgeRow> = rows.iter().filter(|r| !done.contains_key(&r.id)).collect();
    let cache = RingCache::new();
    let count = AtomicUsize::new(0);
    let total = todo.len();
    let fresh: Vec<(String, Result<FeatureRecord>)> = pool(a.jobs.unwrap_or(ctx.config.jobs))?.install(|| {
        todo.par_iter()
            .map(|r| {
                let rec = r.pencil().and_then(|e| Ok(compute_record(&r.id, &e, &basepoints, &cache, None)?));
                let n = count.fetch_add(1, Ordering::Relaxed) + 1;
                if n % 50 == 0 || n == total {
                    eprintln!("gm: {n}/{total}");
                }
                (r.id.clone(), rec)
            })
            .collect()
    });
    let mut failed = 0;
    for (id, rec) in fresh {
        match rec {
            Ok(r) => {
                done.insert(id, r);
            }
            Err(e) => {
                failed += 1;
                eprintln!("gm: edge {id}: {e:#}");
            }
        }
    }
    let ordered: Vec<FeatureRecord> = rows.iter().filter_map(|r| done.remove(&r.id)).collect();
    write_features(&out, Some(&ctx.header()), &ordered).with_context(|| format!("writing {}", out.display()))?;
    println!("{} feature records ({} new, {} failed) -> {}", ordered.len(), total - failed, failed, out.display());
    Ok(0)
}

#[derive(Args, Debug)]
pub struct LabelArgs {
    #[arg(long)]
    edges: PathBuf,
    /// Seconds per edge; defaults to the config.
    #[arg(long)]
    budget: Option<f64>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Label edges again even when a label exists.
    #[arg(long)]
    relabel: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn label(ctx: &Ctx, a: LabelArgs) -> Result<u8> {
    let budget_s = a.budget.unwrap_or(ctx.config.budget_s);
    anyhow::ensure!(budget_s > 0.0, "budget must be positive");
    let budget = Budget::seconds(budget_s);
    let rows = read_edges(&a.edges)?;
    let out = ctx.path(a.out.as_ref(), "labels.jsonl");
    crate::stores::create_parent(&out)?;
    let store = LabelStore::new(&out);
    let known = store.latest()?;
    if !out.exists() || std::fs::metadata(&out)?.len() == 0 {
        store.append_raw(&ctx.header())?;
    }
    let todo: Vec<&EdgeRow> = rows.iter().filter(|r| a.relabel || !known.contains_key(&r.id)).collect();
    let total = todo.len();
    let count = AtomicUsize::new(0);
    let successes = AtomicUsize::new(0);
    let start = Instant::now();
    let results: Vec<Result<()>> = pool(a.jobs.unwrap_or(ctx.config.jobs))?.install(|| {
        todo.par_iter()
            .map(|r| {
                let t = Instant::now();
                let e = r.pencil()?;
                let label = catch_unwind(AssertUnwindSafe(|| label_edge(&r.id, &e, &budget)))
                    .unwrap_or_else(|_| EdgeLabel::fault(&r.id, t.elapsed().as_secs_f64(), &budget));
                store.record(&label)?;
                successes.fetch_add(label.success as usize, Ordering::Relaxed);
                let n = count.fetch_add(1, Ordering::Relaxed) + 1;
                eprintln!(
                    "label {n}/{total} {} {} {:.2}s (elapsed {:.0}s)",
                    r.id,
                    if label.success { "success" } else { "fail" },
                    label.elapsed_s,
                    start.elapsed().as_secs_f64()
                );
                Ok(())
            })
            .collect()
    });
    for r in results {
        r?;
    }
    println!(
        "{total} edges labeled, {} successes, {} already labeled -> {}",
        successes.into_inner(),
        rows.len() - total,
        out.display()
    );
    Ok(0)
}

#[derive(Args, Debug)]
pub struct PcaArgs {
    #[arg(long)]
    edges: PathBuf,
    /// Components kept; defaults to the config.
    #[arg(long)]
    components: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn pca(ctx: &Ctx, a: PcaArgs) -> Result<u8> {
    let k = a.components.unwrap_or(ctx.config.pca_k);
    let rows = read_edges(&a.edges)?;
    let vectors = rows
        .iter()
        .map(|r| Ok(edge_vector(&polynomial(&r.f_poly)?, &polynomial(&r.g_poly)?)))
        .collect::<Result<Vec<_>>>()?;
    let model = pca_fit(&vectors, k)?;
    let explained: f64 = model.explained_variance_ratio().iter().take(k).sum();
    let out = ctx.path(a.out.as_ref(), "pca.json");
    ctx.write_json(&out, &model)?;
    println!("{k} components explain {explained:.4} of the variance of {} edge vectors -> {}", rows.len(), out.display());
    Ok(0)
}
