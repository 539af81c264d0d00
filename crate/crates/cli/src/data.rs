use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use gmplan_core::algebra::{Polynomial, Q};
use gmplan_core::dataset::{
    build_edges, enumerate_fewnomials, parse_edge_id, s4_orbits, smooth_extensions, EdgePolicy, OrbitTable,
    PolicyTag, VertexSet,
};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::stores::{read_json, read_vertices, Ctx, EdgeRow};

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn enumerate(ctx: &Ctx, a: EnumerateArgs) -> Result<u8> {
    let v = enumerate_fewnomials(a.k)?;
    let out = ctx.path(a.out.as_ref(), &format!("vertices-k{}.jsonl", a.k));
    ctx.write_rows(&out, v.rows())?;
    println!("{} smooth {}-nomial quartics -> {}", v.len(), a.k, out.display());
    Ok(0)
}

#[derive(Args, Debug)]
pub struct OrbitsArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    vertices: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn orbits(ctx: &Ctx, a: OrbitsArgs) -> Result<u8> {
    let path = ctx.path(a.vertices.as_ref(), &format!("vertices-k{}.jsonl", a.k));
    let v = VertexSet { k: a.k, members: read_vertices(&path)? };
    let t = s4_orbits(&v);
    let out = ctx.path(a.out.as_ref(), &format!("orbits-k{}.json", a.k));
    ctx.write_json(&out, &t)?;
    println!("{} vertices in {} S4 orbits -> {}", v.len(), t.len(), out.display());
    Ok(0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Sources {
    All,
    OrbitReps,
}

#[derive(Args, Debug)]
pub struct EdgesArgs {
    #[arg(long)]
    k: usize,
    /// complete, monomial-difference or custom.
    #[arg(long, default_value = "complete")]
    policy: String,
    #[arg(long)]
    vertices: Option<PathBuf>,
    /// Source vertices for monomial-difference edges.
    #[arg(long, value_enum, default_value = "all")]
    sources: Sources,
    /// Keep this many random sources.
    #[arg(long)]
    sample_sources: Option<usize>,
    /// File of `i-j` edge ids for the custom policy.
    #[arg(long)]
    pairs: Option<PathBuf>,
    /// Keep this many random edges.
    #[arg(long)]
    sample: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Count the edges without writing them.
    #[arg(long)]
    count_only: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn edges(ctx: &Ctx, a: EdgesArgs) -> Result<u8> {
    let policy: PolicyTag = a.policy.parse()?;
    let path = ctx.path(a.vertices.as_ref(), &format!("vertices-k{}.jsonl", a.k));
    let w = read_vertices(&path)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed.unwrap_or(ctx.config.seed));
    let (set, left, right): (_, Vec<Polynomial<Q>>, Vec<Polynomial<Q>>) = match policy {
        PolicyTag::Complete => (build_edges(&w, &EdgePolicy::Complete)?, w.clone(), w),
        PolicyTag::Custom => {
            let Some(p) = &a.pairs else { bail!("--policy custom needs --pairs") };
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let pairs = text
                .split_whitespace()
                .map(|s| parse_edge_id(s).map(|e| (e.f as usize, e.g as usize)))
                .collect::<Result<Vec<_>, _>>()?;
            (build_edges(&w, &EdgePolicy::Custom(pairs))?, w.clone(), w)
        }
        PolicyTag::MonomialDifference => {
            let mut ids: Vec<usize> = match a.sources {
                Sources::All => (0..w.len()).collect(),
                Sources::OrbitReps => {
                    let orbits = ctx.config.data_dir.join(format!("orbits-k{}.json", a.k));
                    let t: OrbitTable = match read_json(&orbits) {
                        Ok(t) => t,
                        Err(_) => s4_orbits(&VertexSet { k: a.k, members: w.clone() }),
                    };
                    t.representatives
                }
            };
            if let Some(n) = a.sample_sources {
                let mut keep = sample(&mut rng, ids.len(), n.min(ids.len())).into_vec();
                keep.sort_unstable();
                ids = keep.into_iter().map(|i| ids[i]).collect();
            }
            // sources keep their ids in W; companions are numbered in canonical order
            let mut companions: Vec<Polynomial<Q>> = ids.iter().flat_map(|&i| smooth_extensions(&w[i])).collect();
            companions.sort_by_cached_key(|g| g.to_string());
            companions.dedup();
            let sources: Vec<Polynomial<Q>> = ids.iter().map(|&i| w[i].clone()).collect();
            let mut set = build_edges(&sources, &EdgePolicy::MonomialDifference { companions: &companions })?;
            for e in &mut set.edges {
                e.f = ids[e.f as usize] as u32;
            }
            (set, w, companions)
        }
    };
    let mut edges = set.edges;
    if let Some(n) = a.sample {
        let mut keep = sample(&mut rng, edges.len(), n.min(edges.len())).into_vec();
        keep.sort_unstable();
        edges = keep.into_iter().map(|i| edges[i]).collect();
    }
    if a.count_only {
        println!("{} {} edges", edges.len(), policy);
        return Ok(0);
    }
    let rows = edges.iter().map(|e| EdgeRow {
        id: e.id(),
        f: e.f,
        g: e.g,
        f_poly: left[e.f as usize].to_string(),
        g_poly: right[e.g as usize].to_string(),
    });
    let out = ctx.path(a.out.as_ref(), &format!("edges-{policy}-k{}.jsonl", a.k));
    ctx.write_rows(&out, rows)?;
    println!("{} {} edges -> {}", edges.len(), policy, out.display());
    Ok(0)
}
