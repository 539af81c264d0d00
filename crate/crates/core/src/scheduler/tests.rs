use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use super::*;
use crate::budget::CancelToken;
use crate::dataset::Edge;

struct Counting<O> {
    inner: O,
    calls: AtomicUsize,
}

impl<O: EdgeOracle> EdgeOracle for Counting<O> {
    fn attempt(&self, edge: Edge, budget: Duration, cancel: &CancelToken) -> OracleReport {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.inner.attempt(edge, budget, cancel)
    }
}

fn counting<O: EdgeOracle + 'static>(inner: O) -> Arc<Counting<O>> {
    Arc::new(Counting { inner, calls: AtomicUsize::new(0) })
}

fn kinds(r: &SearchResult) -> Vec<AttemptKind> {
    r.attempts.iter().map(|a| a.kind).collect()
}

/// Algorithm 1 written out directly against the expected outcomes.
fn reference(problem: &SearchProblem, oracle: &SyntheticOracle, order: &[usize]) -> (Vec<(usize, AttemptKind)>, bool) {
    let n = problem.vertices;
    let mut comp: Vec<usize> = (0..n).collect();
    let joined = |comp: &Vec<usize>| problem.targets.iter().all(|&t| comp[t as usize] == comp[problem.targets[0] as usize]);
    let mut log = Vec::new();
    for &i in order {
        if joined(&comp) {
            break;
        }
        let e = problem.edges[i];
        let k = oracle.expected(e, problem.budget);
        log.push((i, k));
        if k == AttemptKind::Success {
            let (a, b) = (comp[e.f as usize], comp[e.g as usize]);
            for c in comp.iter_mut() {
                if *c == b {
                    *c = a;
                }
            }
        }
    }
    let ok = joined(&comp);
    (log, ok)
}

#[test]
fn toy_instance_in_edge_order() {
    let (p, o) = toy_problem();
    let r = brute_force(&p, &[0, 1, 2], Arc::new(o), &SearchOptions::default()).unwrap();
    assert_eq!(r.status, SearchStatus::Success);
    assert_eq!(kinds(&r), [AttemptKind::Timeout, AttemptKind::Success, AttemptKind::Success]);
    assert_eq!(r.accepted, [1, 2]);
    let report = SearchReport::build(&p, &r).unwrap();
    assert_eq!(report.tree, [["a", "c"], ["c", "b"]]);
    assert_eq!(report.paths, [["a", "c", "b"]]);
    assert_eq!(report.counts, OutcomeCounts { success: 2, timeout: 1, failed: 0, faulted: 0 });
}

#[test]
fn perfect_and_adversarial_scorers_on_the_toy() {
    let (p, o) = toy_problem();
    let perfect = p.clone().with_scores(vec![0.0, 1.0, 1.0]);
    let r = informed_brute_force(&perfect, Arc::new(o.clone()), &SearchOptions::default()).unwrap();
    assert_eq!((r.status, r.attempts.len()), (SearchStatus::Success, 2));
    let adversarial = p.with_scores(vec![1.0, 0.0, 0.0]);
    let r = informed_brute_force(&adversarial, Arc::new(o), &SearchOptions::default()).unwrap();
    assert_eq!((r.status, r.attempts.len()), (SearchStatus::Success, 3));
    assert_eq!(r.attempts[0].edge, "0-1");
}

#[test]
fn ties_break_by_edge_then_random_order_is_seeded() {
    let (p, _) = toy_problem();
    let tied = p.clone().with_scores(vec![0.5; 3]);
    assert_eq!(queue_order(&tied, 0), [0, 1, 2]);
    assert_eq!(queue_order(&p, 7), queue_order(&p, 7));
    let mut o = queue_order(&p, 7);
    o.sort();
    assert_eq!(o, [0, 1, 2]);
}

#[test]
fn trivial_instances() {
    let o: Arc<dyn EdgeOracle> = Arc::new(SyntheticOracle::simulated(HashMap::new()));
    let empty = SearchProblem::new(2, vec![0, 1], vec![], Duration::from_secs(30));
    let r = brute_force(&empty, &[], Arc::clone(&o), &SearchOptions::default()).unwrap();
    assert_eq!(r.status, SearchStatus::Fail);
    let single = SearchProblem::new(1, vec![0], vec![], Duration::from_secs(30));
    let r = brute_force(&single, &[], o, &SearchOptions::default()).unwrap();
    assert_eq!((r.status, r.attempts.len()), (SearchStatus::Success, 0));
}

#[test]
fn order_must_be_a_bijection() {
    let (p, o) = toy_problem();
    let o: Arc<dyn EdgeOracle> = Arc::new(o);
    for bad in [&[0, 1][..], &[0, 1, 1], &[0, 1, 3]] {
        assert!(matches!(
            brute_force(&p, bad, Arc::clone(&o), &SearchOptions::default()),
            Err(SchedError::InvalidProblem(_))
        ));
    }
}

#[test]
fn stalled_edge_times_out_near_the_budget() {
    let e = Edge::new(0, 1);
    let o: Arc<dyn EdgeOracle> = Arc::new(SyntheticOracle::sleeping([(e, SyntheticCost::Never)].into(), 1.0));
    let start = Instant::now();
    let a = attempt_edge(&o, e, Duration::from_millis(100), 0);
    let t = start.elapsed().as_secs_f64();
    assert_eq!(a.kind, AttemptKind::Timeout);
    assert!((0.1..0.12).contains(&t), "{t}");
    let quick = Edge::new(1, 2);
    let o: Arc<dyn EdgeOracle> = Arc::new(SyntheticOracle::sleeping([(quick, SyntheticCost::Seconds(0.01))].into(), 1.0));
    assert_eq!(attempt_edge(&o, quick, Duration::from_secs(30), 0).kind, AttemptKind::Success);
}

struct Deaf;

impl EdgeOracle for Deaf {
    fn attempt(&self, _: Edge, _: Duration, _: &CancelToken) -> OracleReport {
        std::thread::sleep(Duration::from_secs(2));
        OracleReport::of(AttemptKind::Success)
    }
}

#[test]
fn uncooperative_oracle_is_abandoned_at_the_hard_deadline() {
    let o: Arc<dyn EdgeOracle> = Arc::new(Deaf);
    let start = Instant::now();
    let a = attempt_edge(&o, Edge::new(0, 1), Duration::from_millis(100), 0);
    assert_eq!(a.kind, AttemptKind::Timeout);
    assert!(start.elapsed().as_secs_f64() < 0.12);
}

#[test]
fn faults_are_logged_and_the_search_continues() {
    let (mut p, _) = toy_problem();
    p.edges = vec![Edge::new(0, 1), Edge::new(0, 2), Edge::new(2, 1)];
    let costs = [SyntheticCost::Crash, SyntheticCost::Seconds(1.0), SyntheticCost::Seconds(1.0)];
    let o = counting(SyntheticOracle::simulated(p.edges.iter().copied().zip(costs).collect()));
    let opts = SearchOptions { retries: 2, ..SearchOptions::default() };
    let r = brute_force(&p, &[0, 1, 2], o.clone(), &opts).unwrap();
    assert_eq!(r.status, SearchStatus::Success);
    assert_eq!(r.attempts[0].kind, AttemptKind::Faulted);
    assert!(r.attempts[0].detail.as_deref().unwrap().contains("injected"));
    assert_eq!(o.calls.load(Ordering::SeqCst), 3 + 2);
}

#[test]
fn reported_failures_are_not_faults() {
    let e = Edge::new(0, 1);
    let o: Arc<dyn EdgeOracle> = Arc::new(SyntheticOracle::simulated([(e, SyntheticCost::Fail)].into()));
    let a = attempt_edge(&o, e, Duration::from_secs(1), 3);
    assert_eq!((a.kind, a.tries), (AttemptKind::Failed, 1));
}

#[test]
fn interrupt_and_resume_on_the_toy() {
    let dir = tempfile::tempdir().unwrap();
    let (p, o) = toy_problem();
    let full = brute_force(&p, &[0, 1, 2], Arc::new(o.clone()), &SearchOptions::default()).unwrap();
    let opts = SearchOptions { checkpoint: Some(dir.path().join("log.jsonl")), ..SearchOptions::default() };
    let cut = SearchOptions { max_attempts: Some(1), ..opts.clone() };
    let first = brute_force(&p, &[0, 1, 2], Arc::new(o.clone()), &cut).unwrap();
    assert_eq!((first.status, first.attempts.len()), (SearchStatus::Interrupted, 1));
    let c = counting(o.clone());
    let second = resume(&p, &[0, 1, 2], c.clone(), &opts).unwrap();
    assert_eq!(c.calls.load(Ordering::SeqCst), 2);
    assert_eq!((second.status, &second.accepted), (full.status, &full.accepted));
    assert_eq!(kinds(&second), kinds(&full));
    // a completed search replays without calling the oracle
    let c = counting(o);
    let third = resume(&p, &[0, 1, 2], c.clone(), &opts).unwrap();
    assert_eq!(c.calls.load(Ordering::SeqCst), 0);
    assert_eq!(third.accepted, full.accepted);
    let log = load_checkpoint(&dir.path().join("log.jsonl"), &p).unwrap();
    assert_eq!(ForestState::replay(&p, &log).accepted, full.accepted);
}

#[test]
fn empty_checkpoint_is_a_fresh_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("log.jsonl");
    std::fs::write(&path, "").unwrap();
    let (p, o) = toy_problem();
    let opts = SearchOptions { checkpoint: Some(path), ..SearchOptions::default() };
    let r = resume(&p, &[0, 1, 2], Arc::new(o), &opts).unwrap();
    assert_eq!(r.fresh_attempts, 3);
}

#[test]
fn corrupt_checkpoint_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("log.jsonl");
    let (p, o) = toy_problem();
    let header = serde_json::json!({"_meta": {"command": "test"}});
    let opts = SearchOptions { checkpoint: Some(path.clone()), checkpoint_header: Some(header), ..SearchOptions::default() };
    brute_force(&p, &[0, 1, 2], Arc::new(o.clone()), &opts).unwrap();
    let mut text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(load_checkpoint(&path, &p).unwrap().len(), 3);
    text.push_str("{\"seq\": 3, truncated\n");
    std::fs::write(&path, &text).unwrap();
    match resume(&p, &[0, 1, 2], Arc::new(o.clone()), &opts) {
        Err(SchedError::CorruptCheckpoint { line, .. }) => assert_eq!(line, 5),
        other => panic!("{other:?}"),
    }
    // an edge id that disagrees with the problem
    let wrong = text.lines().take(2).collect::<Vec<_>>().join("\n").replace("\"0-1\"", "\"1-0\"");
    std::fs::write(&path, wrong).unwrap();
    assert!(matches!(load_checkpoint(&path, &p), Err(SchedError::CorruptCheckpoint { line: 2, .. })));
}

#[test]
fn random_instances_match_the_reference() {
    for seed in 0..40 {
        let (p, o) = random_instance(seed, 40);
        let order = queue_order(&p, seed);
        let r = brute_force(&p, &order, Arc::new(o.clone()), &SearchOptions::default()).unwrap();
        let (log, ok) = reference(&p, &o, &order);
        let got: Vec<_> = r.attempts.iter().map(|a| (a.index, a.kind)).collect();
        assert_eq!(got, log, "seed {seed}");
        assert_eq!(r.status == SearchStatus::Success, ok);
        let replay = ForestState::replay(&p, &r.attempts);
        assert_eq!(replay.accepted, r.accepted);
    }
}

#[test]
fn parallel_runs_reach_the_same_verdict() {
    for seed in 0..20 {
        let (p, o) = random_instance(seed, 30);
        let order = queue_order(&p, seed);
        let single = brute_force(&p, &order, Arc::new(o.clone()), &SearchOptions::default()).unwrap();
        let opts = SearchOptions { workers: 4, ..SearchOptions::default() };
        let multi = brute_force(&p, &order, Arc::new(o), &opts).unwrap();
        assert_eq!(single.status, multi.status, "seed {seed}");
        let mut seen: Vec<_> = multi.attempts.iter().map(|a| a.index).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), multi.attempts.len());
    }
}

#[test]
fn perfect_scorer_attempts_only_forest_edges() {
    for seed in 0..40 {
        let (p, o) = random_instance(seed, 40);
        let scores = p.edges.iter().map(|&e| (o.expected(e, p.budget) == AttemptKind::Success) as u8 as f64).collect();
        let p = p.with_scores(scores);
        let opts = SearchOptions { skip_redundant: true, ..SearchOptions::default() };
        let r = informed_brute_force(&p, Arc::new(o), &opts).unwrap();
        let failures = r.attempts.iter().filter(|a| a.kind != AttemptKind::Success).count();
        assert!(r.attempts.len() <= r.accepted.len() + failures);
        if r.status == SearchStatus::Success {
            assert_eq!(failures, 0, "seed {seed}");
            let accepted: Vec<_> = r.accepted.iter().map(|&i| p.edges[i]).collect();
            assert!(extract_tree(p.vertices, &accepted, &p.targets).unwrap().len() <= accepted.len());
        }
    }
}

#[test]
fn rounds_stop_when_the_hook_declines() {
    let (mut p, o) = toy_problem();
    p.edges.truncate(1);
    let o: Arc<dyn EdgeOracle> = Arc::new(o);
    let mut calls = 0;
    let rounds = informed_search_rounds(&mut p, Arc::clone(&o), &SearchOptions::default(), 5, |_, prob| {
        calls += 1;
        if calls == 1 {
            prob.edges.extend([Edge::new(0, 2), Edge::new(2, 1)]);
            true
        } else {
            false
        }
    })
    .unwrap();
    assert_eq!(rounds.len(), 2);
    assert_eq!(rounds[0].status, SearchStatus::Fail);
    assert_eq!(rounds[1].status, SearchStatus::Success);
}

#[test]
fn success_histogram() {
    let outcomes = [(0, true), (0, true), (1, false), (1, false), (2, true), (2, false)];
    assert_eq!(success_frequency(&outcomes, 2), [1, 1, 1]);
}
