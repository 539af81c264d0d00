use std::collections::HashMap;
use std::time::Duration;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::Edge;

use super::oracle::{SyntheticCost, SyntheticOracle};
use super::SearchProblem;

/// Targets `a, b` and waypoint `c`; the direct edge never finishes and
/// both edges through `c` take one second of a 30 second budget.
pub fn toy_problem() -> (SearchProblem, SyntheticOracle) {
    let edges = vec![Edge::new(0, 1), Edge::new(0, 2), Edge::new(2, 1)];
    let costs = [SyntheticCost::Never, SyntheticCost::Seconds(1.0), SyntheticCost::Seconds(1.0)];
    let mut problem = SearchProblem::new(3, vec![0, 1], edges.clone(), Duration::from_secs(30));
    problem.names = Some(vec!["a".into(), "b".into(), "c".into()]);
    (problem, SyntheticOracle::simulated(edges.into_iter().zip(costs).collect()))
}

/// Random instance on at most `max_vertices` waypoints with a 30 second
/// budget. Costs mix quick and slow successes, stalls and reported failures.
pub fn random_instance(seed: u64, max_vertices: usize) -> (SearchProblem, SyntheticOracle) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=max_vertices.max(2));
    let n_targets = rng.gen_range(2..=n.min(6));
    let targets = sample(&mut rng, n, n_targets).into_iter().map(|v| v as u32).collect();
    let density = rng.gen_range(0.05..0.5);
    let mut edges = Vec::new();
    let mut costs = HashMap::new();
    for i in 0..n {
        for j in i + 1..n {
            if !rng.gen_bool(density) {
                continue;
            }
            let e = if rng.gen_bool(0.5) { Edge::new(i, j) } else { Edge::new(j, i) };
            let cost = match rng.gen_range(0..10) {
                0..=4 => SyntheticCost::Seconds(rng.gen_range(0.0..29.0)),
                5..=6 => SyntheticCost::Seconds(rng.gen_range(30.0..120.0)),
                7..=8 => SyntheticCost::Never,
                _ => SyntheticCost::Fail,
            };
            edges.push(e);
            costs.insert(e, cost);
        }
    }
    let problem = SearchProblem::new(n, targets, edges, Duration::from_secs(30));
    (problem, SyntheticOracle::simulated(costs))
}
