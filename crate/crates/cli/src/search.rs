use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::Args;
use gmplan_core::dataset::{parse_edge_id, Edge};
use gmplan_core::picard_fuchs::LabelStore;
use gmplan_core::scheduler::{
    queue_order, resume, success_frequency, EdgeOracle, PencilOracle, SearchOptions, SearchProblem, SearchReport,
    SearchStatus, SyntheticCost, SyntheticOracle,
};
use serde::{Deserialize, Serialize};

use crate::config::parse_list;
use crate::model::Prediction;
use crate::stores::{polynomial, read_edges, read_json, read_rows, Ctx};
use crate::{EXIT_FAIL, EXIT_INTERRUPTED};

const TOY: &str = include_str!("../data/toy_problem.json");

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum CostSpec {
    Seconds(f64),
    Named(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct SyntheticEdge {
    f: String,
    g: String,
    cost: CostSpec,
}

/// A search problem with prescribed edge costs.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct SyntheticProblem {
    names: Vec<String>,
    targets: Vec<String>,
    budget_s: f64,
    edges: Vec<SyntheticEdge>,
}

impl SyntheticProblem {
    fn build(&self, budget: Option<f64>) -> Result<(SearchProblem, SyntheticOracle)> {
        let index: HashMap<&str, u32> = self.names.iter().enumerate().map(|(i, n)| (n.as_str(), i as u32)).collect();
        anyhow::ensure!(index.len() == self.names.len(), "duplicate vertex names");
        let id = |n: &str| index.get(n).copied().with_context(|| format!("unknown vertex `{n}`"));
        let mut edges = Vec::new();
        let mut costs = HashMap::new();
        for e in &self.edges {
            let edge = Edge { f: id(&e.f)?, g: id(&e.g)? };
            let cost = match &e.cost {
                CostSpec::Seconds(s) if *s >= 0.0 => SyntheticCost::Seconds(*s),
                CostSpec::Named(n) if n == "never" => SyntheticCost::Never,
                CostSpec::Named(n) if n == "fail" => SyntheticCost::Fail,
                CostSpec::Named(n) if n == "crash" => SyntheticCost::Crash,
                other => bail!("edge {}-{}: bad cost {other:?}", e.f, e.g),
            };
            edges.push(edge);
            costs.insert(edge, cost);
        }
        let targets = self.targets.iter().map(|t| id(t)).collect::<Result<_>>()?;
        let budget = Duration::from_secs_f64(budget.unwrap_or(self.budget_s));
        let mut p = SearchProblem::new(self.names.len(), targets, edges, budget);
        p.names = Some(self.names.clone());
        Ok((p, SyntheticOracle::simulated(costs)))
    }
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    /// Synthetic problem file, or `toy` for the bundled one.
    #[arg(long, conflicts_with = "edges")]
    problem: Option<String>,
    /// Edge store whose endpoints share one id space.
    #[arg(long)]
    edges: Option<PathBuf>,
    /// Comma-separated target vertex ids.
    #[arg(long)]
    targets: Option<String>,
    /// Comma-separated waypoint ids; edges leaving them are dropped.
    #[arg(long)]
    waypoints: Option<String>,
    /// Seconds per attempt; defaults to the config budget.
    #[arg(long)]
    threshold: Option<f64>,
    /// Predictions giving the queue order.
    #[arg(long, conflicts_with = "random")]
    scored: Option<PathBuf>,
    /// Seeded random queue order.
    #[arg(long)]
    random: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Skip edges whose endpoints are already connected.
    #[arg(long)]
    skip_redundant: bool,
    /// Attempt log; an existing log is resumed.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Discard an existing attempt log first.
    #[arg(long)]
    fresh: bool,
    /// Stop after this many new attempts.
    #[arg(long)]
    max_attempts: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn store_problem(ctx: &Ctx, a: &SearchArgs, path: &PathBuf) -> Result<(SearchProblem, Arc<dyn EdgeOracle>)> {
    let rows = read_edges(path)?;
    let Some(t) = &a.targets else { bail!("--edges needs --targets") };
    let targets: Vec<u32> = parse_list(t)?;
    let waypoints: Option<BTreeSet<u32>> =
        a.waypoints.as_deref().map(parse_list::<u32>).transpose()?.map(|w| w.into_iter().chain(targets.iter().copied()).collect());
    let mut polys: BTreeMap<u32, &str> = BTreeMap::new();
    let mut edges = Vec::new();
    for r in &rows {
        for (v, p) in [(r.f, &r.f_poly), (r.g, &r.g_poly)] {
            if *polys.entry(v).or_insert(p) != p.as_str() {
                bail!("vertex {v} has two polynomials; search needs edges over one vertex set");
            }
        }
        if waypoints.as_ref().map_or(true, |w| w.contains(&r.f) && w.contains(&r.g)) {
            edges.push(r.edge());
        }
    }
    let n = polys.keys().chain(&targets).max().map_or(0, |&m| m as usize + 1);
    let filler = polys.values().next().copied().unwrap_or("x^4 + y^4 + z^4 + w^4");
    let vertices = (0..n as u32).map(|v| polynomial(polys.get(&v).copied().unwrap_or(filler))).collect::<Result<_>>()?;
    let budget = Duration::from_secs_f64(a.threshold.unwrap_or(ctx.config.budget_s));
    let mut problem = SearchProblem::new(n, targets, edges, budget);
    if let Some(s) = &a.scored {
        let preds: Vec<Prediction> = read_rows(s)?;
        let by_edge: HashMap<String, f64> = preds.into_iter().map(|p| (p.edge, p.score)).collect();
        let scores = problem
            .edges
            .iter()
            .map(|e| by_edge.get(&e.id()).copied().with_context(|| format!("no score for edge {}", e.id())))
            .collect::<Result<_>>()?;
        problem.scores = Some(scores);
    }
    Ok((problem, Arc::new(PencilOracle::new(vertices))))
}

pub fn search(ctx: &Ctx, a: SearchArgs) -> Result<u8> {
    let seed = a.seed.unwrap_or(ctx.config.seed);
    let (problem, oracle): (SearchProblem, Arc<dyn EdgeOracle>) = match (&a.problem, &a.edges) {
        (Some(p), _) => {
            let spec: SyntheticProblem = if p == "toy" { serde_json::from_str(TOY)? } else { read_json(&PathBuf::from(p))? };
            let (mut problem, oracle) = spec.build(a.threshold)?;
            if let Some(s) = &a.scored {
                let preds: Vec<Prediction> = read_rows(s)?;
                let by_edge: HashMap<String, f64> = preds.into_iter().map(|p| (p.edge, p.score)).collect();
                problem.scores = Some(problem.edges.iter().map(|e| by_edge.get(&e.id()).copied().unwrap_or(0.0)).collect());
            }
            (problem, Arc::new(oracle))
        }
        (None, Some(path)) => store_problem(ctx, &a, path)?,
        (None, None) => bail!("search needs --problem or --edges"),
    };
    problem.validate()?;
    let order = if a.scored.is_some() || a.random {
        queue_order(&problem, seed)
    } else {
        (0..problem.edges.len()).collect()
    };
    let checkpoint = ctx.path(a.checkpoint.as_ref(), "search-checkpoint.jsonl");
    if a.fresh && checkpoint.exists() {
        std::fs::remove_file(&checkpoint).with_context(|| format!("removing {}", checkpoint.display()))?;
    }
    crate::stores::create_parent(&checkpoint)?;
    let opts = SearchOptions {
        workers: a.jobs.unwrap_or(ctx.config.jobs),
        retries: ctx.config.retries,
        skip_redundant: a.skip_redundant,
        checkpoint: Some(checkpoint.clone()),
        checkpoint_header: Some(ctx.header()),
        fsync: ctx.config.fsync,
        max_attempts: a.max_attempts,
        seed,
    };
    let result = resume(&problem, &order, oracle, &opts)?;
    let report = SearchReport::build(&problem, &result)?;
    let out = ctx.path(a.out.as_ref(), "search.json");
    ctx.write_json(&out, &report)?;
    print_report(&report);
    println!("report -> {}, attempt log -> {}", out.display(), checkpoint.display());
    Ok(match result.status {
        SearchStatus::Success => 0,
        SearchStatus::Fail => EXIT_FAIL,
        SearchStatus::Interrupted => EXIT_INTERRUPTED,
    })
}

fn print_report(r: &SearchReport) {
    println!("status: {:?}", r.status);
    println!(
        "attempts: {} (success {}, timeout {}, failed {}, faulted {})",
        r.attempts, r.counts.success, r.counts.timeout, r.counts.failed, r.counts.faulted
    );
    println!("accepted edges: {}", r.accepted.len());
    for p in &r.paths {
        println!("path: {}", p.join(" -> "));
    }
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Search report to summarize.
    #[arg(long)]
    search: Option<PathBuf>,
    /// `name=path` edge selections to tabulate against the labels.
    #[arg(long = "selection")]
    selections: Vec<String>,
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Chosen edges per source vertex.
    #[arg(long, default_value_t = 10)]
    per_vertex: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct FrequencyTable {
    per_vertex: usize,
    /// Success counts `0..=per_vertex`, then one row per selection.
    rows: BTreeMap<String, Vec<usize>>,
    unlabeled: BTreeMap<String, usize>,
}

pub fn report(ctx: &Ctx, a: ReportArgs) -> Result<u8> {
    if let Some(s) = &a.search {
        let r: SearchReport = read_json(s)?;
        print_report(&r);
        return Ok(match r.status {
            SearchStatus::Success => 0,
            SearchStatus::Fail => EXIT_FAIL,
            SearchStatus::Interrupted => EXIT_INTERRUPTED,
        });
    }
    if a.selections.is_empty() {
        bail!("report needs --search or --selection");
    }
    let labels = LabelStore::new(ctx.path(a.labels.as_ref(), "labels.jsonl")).latest()?;
    let mut table = FrequencyTable { per_vertex: a.per_vertex, rows: BTreeMap::new(), unlabeled: BTreeMap::new() };
    for sel in &a.selections {
        let (name, path) = sel.split_once('=').with_context(|| format!("selection `{sel}` is not name=path"))?;
        let preds: Vec<Prediction> = read_rows(&PathBuf::from(path))?;
        let mut outcomes = Vec::new();
        let mut missing = 0;
        for p in &preds {
            match labels.get(&p.edge) {
                Some(l) => outcomes.push((parse_edge_id(&p.edge)?.f, l.success)),
                None => missing += 1,
            }
        }
        table.rows.insert(name.to_string(), success_frequency(&outcomes, a.per_vertex));
        table.unlabeled.insert(name.to_string(), missing);
    }
    let width = table.rows.keys().map(|k| k.len()).max().unwrap_or(0).max(16);
    print!("{:>width$} |", "# of connections");
    for j in 0..=a.per_vertex {
        print!(" {j:>3}");
    }
    println!();
    for (name, row) in &table.rows {
        print!("{name:>width$} |");
        for c in row {
            print!(" {c:>3}");
        }
        println!();
    }
    let out = ctx.path(a.out.as_ref(), "frequency.json");
    ctx.write_json(&out, &table)?;
    println!("table -> {}", out.display());
    Ok(0)
}
