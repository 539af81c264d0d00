use std::collections::HashSet;
use std::path::PathBuf;
use std::sync::mpsc;
use std::sync::Arc;
use std::thread;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::checkpoint::{load_checkpoint, now, AttemptRecord, Checkpoint};
use super::oracle::{attempt_edge, Attempt, AttemptKind, EdgeOracle};
use super::{ForestState, SchedError, SearchProblem};

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub workers: usize,
    /// Extra tries after a fault.
    pub retries: usize,
    /// Skip edges whose endpoints are already connected.
    pub skip_redundant: bool,
    pub checkpoint: Option<PathBuf>,
    pub checkpoint_header: Option<serde_json::Value>,
    pub fsync: bool,
    /// Stop after this many attempts in this run, leaving the rest for a resume.
    pub max_attempts: Option<usize>,
    /// Seed of the random order when no scorer is given.
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            workers: 1,
            retries: 0,
            skip_redundant: false,
            checkpoint: None,
            checkpoint_header: None,
            fsync: false,
            max_attempts: None,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    Success,
    Fail,
    Interrupted,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub status: SearchStatus,
    /// Indices into the problem's edges, in acceptance order.
    pub accepted: Vec<usize>,
    /// Every terminal attempt, including replayed ones.
    pub attempts: Vec<AttemptRecord>,
    /// Attempts made by this run, excluding replayed ones.
    pub fresh_attempts: usize,
    pub order: Vec<usize>,
}

/// Brute force with thresholding: attempts edges in `order` and returns as
/// soon as every target lies in one component.
pub fn brute_force(
    problem: &SearchProblem,
    order: &[usize],
    oracle: Arc<dyn EdgeOracle>,
    opts: &SearchOptions,
) -> Result<SearchResult, SchedError> {
    run(problem, order, oracle, opts, Vec::new())
}

/// Descending scores with ties in edge order; a seeded shuffle without
/// scores.
pub fn queue_order(problem: &SearchProblem, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..problem.edges.len()).collect();
    match &problem.scores {
        Some(s) => order.sort_by(|&a, &b| {
            s[b].total_cmp(&s[a]).then_with(|| problem.edges[a].cmp(&problem.edges[b])).then(a.cmp(&b))
        }),
        None => order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed)),
    }
    order
}

/// One round of the informed search. The attempt records are fresh labels.
pub fn informed_brute_force(
    problem: &SearchProblem,
    oracle: Arc<dyn EdgeOracle>,
    opts: &SearchOptions,
) -> Result<SearchResult, SchedError> {
    let order = queue_order(problem, opts.seed);
    brute_force(problem, &order, oracle, opts)
}

/// Repeats the informed search while it fails and `between_rounds` asks for
/// another round; the hook may enlarge the problem or rescore its edges.
pub fn informed_search_rounds(
    problem: &mut SearchProblem,
    oracle: Arc<dyn EdgeOracle>,
    opts: &SearchOptions,
    max_rounds: usize,
    mut between_rounds: impl FnMut(&SearchResult, &mut SearchProblem) -> bool,
) -> Result<Vec<SearchResult>, SchedError> {
    let mut rounds = Vec::new();
    for _ in 0..max_rounds {
        let r = informed_brute_force(problem, Arc::clone(&oracle), opts)?;
        let done = r.status != SearchStatus::Fail;
        rounds.push(r);
        if done || !between_rounds(rounds.last().unwrap(), problem) {
            break;
        }
    }
    Ok(rounds)
}

/// Continues from the checkpoint in `opts`, never repeating a logged edge.
pub fn resume(
    problem: &SearchProblem,
    order: &[usize],
    oracle: Arc<dyn EdgeOracle>,
    opts: &SearchOptions,
) -> Result<SearchResult, SchedError> {
    let prior = match &opts.checkpoint {
        Some(p) => load_checkpoint(p, problem)?,
        None => Vec::new(),
    };
    run(problem, order, oracle, opts, prior)
}

fn run(
    problem: &SearchProblem,
    order: &[usize],
    oracle: Arc<dyn EdgeOracle>,
    opts: &SearchOptions,
    prior: Vec<AttemptRecord>,
) -> Result<SearchResult, SchedError> {
    problem.validate()?;
    validate_order(problem, order)?;
    let mut forest = ForestState::new(problem.vertices);
    let mut attempted = HashSet::new();
    let mut attempts = Vec::with_capacity(prior.len());
    for r in prior {
        if attempted.insert(r.index) {
            if r.kind == AttemptKind::Success {
                forest.accept(problem, r.index);
            }
            attempts.push(r);
        }
    }
    let mut checkpoint = match &opts.checkpoint {
        Some(p) => Some(Checkpoint::open(p, opts.checkpoint_header.as_ref(), opts.fsync)?),
        None => None,
    };
    let result = |forest: ForestState, attempts, fresh, status| SearchResult {
        status,
        accepted: forest.accepted,
        attempts,
        fresh_attempts: fresh,
        order: order.to_vec(),
    };
    if forest.connects(&problem.targets) {
        return Ok(result(forest, attempts, 0, SearchStatus::Success));
    }
    let queue: Vec<usize> = order.iter().copied().filter(|i| !attempted.contains(i)).collect();
    let workers = opts.workers.max(1);
    let (tx, rx) = mpsc::channel::<(usize, Attempt)>();
    let mut next = 0;
    let mut in_flight = 0;
    let mut fresh = 0;
    let mut stop = false;
    let mut interrupted = false;
    loop {
        while !stop && in_flight < workers && next < queue.len() {
            if opts.max_attempts.is_some_and(|m| fresh >= m) {
                stop = true;
                interrupted = true;
                break;
            }
            let i = queue[next];
            next += 1;
            let e = problem.edges[i];
            if opts.skip_redundant && forest.connected(e.f, e.g) {
                continue;
            }
            let tx = tx.clone();
            let oracle = Arc::clone(&oracle);
            let (budget, retries) = (problem.budget, opts.retries);
            thread::spawn(move || {
                let a = attempt_edge(&oracle, e, budget, retries);
                let _ = tx.send((i, a));
            });
            in_flight += 1;
            fresh += 1;
        }
        if in_flight == 0 {
            break;
        }
        let (i, a) = rx.recv().expect("attempt threads always report");
        in_flight -= 1;
        let record = AttemptRecord {
            seq: attempts.len(),
            edge: problem.edges[i].id(),
            index: i,
            kind: a.kind,
            elapsed_s: a.elapsed.as_secs_f64(),
            timestamp: now(),
            detail: a.detail,
        };
        if let Some(c) = checkpoint.as_mut() {
            c.append(&record)?;
        }
        attempts.push(record);
        if a.kind == AttemptKind::Success {
            forest.accept(problem, i);
            if forest.connects(&problem.targets) {
                stop = true;
            }
        }
    }
    let status = if forest.connects(&problem.targets) {
        SearchStatus::Success
    } else if interrupted {
        SearchStatus::Interrupted
    } else {
        SearchStatus::Fail
    };
    Ok(result(forest, attempts, fresh, status))
}

fn validate_order(problem: &SearchProblem, order: &[usize]) -> Result<(), SchedError> {
    let mut seen = vec![false; problem.edges.len()];
    for &i in order {
        if i >= seen.len() || std::mem::replace(&mut seen[i], true) {
            return Err(SchedError::InvalidProblem("queue order is not a bijection onto the edges".into()));
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(SchedError::InvalidProblem("queue order is not a bijection onto the edges".into()));
    }
    Ok(())
}
