use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::mpsc;
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::algebra::{Polynomial, Q};
use crate::budget::{Budget, CancelToken, Meter};
use crate::connection::Pencil;
use crate::dataset::Edge;
use crate::picard_fuchs::{first_ode_with, Outcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttemptKind {
    Success,
    Timeout,
    /// The oracle finished and reported that the edge cannot be computed.
    Failed,
    /// The attempt crashed or never reported.
    Faulted,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub kind: AttemptKind,
    /// Cost the oracle claims, for simulated oracles; wall time otherwise.
    pub elapsed: Option<Duration>,
    pub detail: Option<String>,
}

impl OracleReport {
    pub fn of(kind: AttemptKind) -> Self {
        OracleReport { kind, elapsed: None, detail: None }
    }
}

/// One computation per edge, bounded by `budget` and cooperatively
/// cancellable through `cancel`.
pub trait EdgeOracle: Send + Sync {
    fn attempt(&self, edge: Edge, budget: Duration, cancel: &CancelToken) -> OracleReport;
}

/// Terminal outcome of [`attempt_edge`].
#[derive(Clone, Debug, PartialEq)]
pub struct Attempt {
    pub kind: AttemptKind,
    pub elapsed: Duration,
    pub detail: Option<String>,
    pub tries: usize,
}

/// Hard deadline as a multiple of the budget; an oracle still running then
/// is cancelled and abandoned.
pub const HARD_DEADLINE_FACTOR: f64 = 1.1;

/// Runs the oracle on its own thread. A panic becomes `Faulted`; faults are
/// retried up to `retries` more times.
pub fn attempt_edge(oracle: &Arc<dyn EdgeOracle>, edge: Edge, budget: Duration, retries: usize) -> Attempt {
    let mut tries = 0;
    loop {
        tries += 1;
        let mut a = attempt_once(oracle, edge, budget);
        a.tries = tries;
        if a.kind != AttemptKind::Faulted || tries > retries {
            return a;
        }
    }
}

fn attempt_once(oracle: &Arc<dyn EdgeOracle>, edge: Edge, budget: Duration) -> Attempt {
    let (tx, rx) = mpsc::channel();
    let cancel = CancelToken::new();
    let start = Instant::now();
    let worker = {
        let oracle = Arc::clone(oracle);
        let cancel = cancel.clone();
        thread::Builder::new().name(format!("attempt-{}", edge.id())).spawn(move || {
            let r = catch_unwind(AssertUnwindSafe(|| oracle.attempt(edge, budget, &cancel)));
            let _ = tx.send(r);
        })
    };
    if let Err(e) = worker {
        return Attempt { kind: AttemptKind::Faulted, elapsed: start.elapsed(), detail: Some(e.to_string()), tries: 1 };
    }
    let deadline = budget.mul_f64(HARD_DEADLINE_FACTOR);
    match rx.recv_timeout(deadline) {
        Ok(Ok(report)) => Attempt {
            kind: report.kind,
            elapsed: report.elapsed.unwrap_or_else(|| start.elapsed()),
            detail: report.detail,
            tries: 1,
        },
        Ok(Err(panic)) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "worker panicked".to_string());
            Attempt { kind: AttemptKind::Faulted, elapsed: start.elapsed(), detail: Some(msg), tries: 1 }
        }
        Err(mpsc::RecvTimeoutError::Timeout) => {
            cancel.cancel();
            Attempt {
                kind: AttemptKind::Timeout,
                elapsed: start.elapsed(),
                detail: Some("abandoned at the hard deadline".into()),
                tries: 1,
            }
        }
        Err(mpsc::RecvTimeoutError::Disconnected) => Attempt {
            kind: AttemptKind::Faulted,
            elapsed: start.elapsed(),
            detail: Some("worker exited without reporting".into()),
            tries: 1,
        },
    }
}

/// Prescribed behaviour of one synthetic edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SyntheticCost {
    Seconds(f64),
    Never,
    /// Reports `Failed` immediately.
    Fail,
    /// Panics, standing in for a killed worker.
    Crash,
}

/// Oracle with fixed per-edge costs. Simulated mode answers at once with
/// the virtual cost; sleeping mode waits `cost * scale` in real time.
#[derive(Clone, Debug)]
pub struct SyntheticOracle {
    costs: HashMap<Edge, SyntheticCost>,
    sleep_scale: Option<f64>,
}

impl SyntheticOracle {
    pub fn simulated(costs: HashMap<Edge, SyntheticCost>) -> Self {
        SyntheticOracle { costs, sleep_scale: None }
    }

    pub fn sleeping(costs: HashMap<Edge, SyntheticCost>, scale: f64) -> Self {
        SyntheticOracle { costs, sleep_scale: Some(scale) }
    }

    pub fn cost(&self, edge: Edge) -> SyntheticCost {
        self.costs.get(&edge).copied().unwrap_or(SyntheticCost::Never)
    }

    /// The outcome a correct attempt must produce.
    pub fn expected(&self, edge: Edge, budget: Duration) -> AttemptKind {
        match self.cost(edge) {
            SyntheticCost::Seconds(s) if s < budget.as_secs_f64() => AttemptKind::Success,
            SyntheticCost::Seconds(_) | SyntheticCost::Never => AttemptKind::Timeout,
            SyntheticCost::Fail => AttemptKind::Failed,
            SyntheticCost::Crash => AttemptKind::Faulted,
        }
    }
}

impl EdgeOracle for SyntheticOracle {
    fn attempt(&self, edge: Edge, budget: Duration, cancel: &CancelToken) -> OracleReport {
        let cost = self.cost(edge);
        match cost {
            SyntheticCost::Crash => panic!("injected fault on edge {}", edge.id()),
            SyntheticCost::Fail => return OracleReport::of(AttemptKind::Failed),
            _ => {}
        }
        let secs = match cost {
            SyntheticCost::Seconds(s) => s,
            _ => f64::INFINITY,
        };
        let Some(scale) = self.sleep_scale else {
            let b = budget.as_secs_f64();
            let (kind, t) = if secs < b { (AttemptKind::Success, secs) } else { (AttemptKind::Timeout, b) };
            return OracleReport { kind, elapsed: Some(Duration::from_secs_f64(t)), detail: None };
        };
        let start = Instant::now();
        let wait = secs * scale;
        loop {
            let t = start.elapsed();
            if t.as_secs_f64() >= wait {
                return OracleReport::of(AttemptKind::Success);
            }
            if t >= budget || cancel.is_cancelled() {
                return OracleReport::of(AttemptKind::Timeout);
            }
            thread::sleep(Duration::from_millis(2));
        }
    }
}

/// Oracle that derives the first Picard-Fuchs operator of the pencil
/// between two vertices.
#[derive(Clone, Debug)]
pub struct PencilOracle {
    vertices: Vec<Polynomial<Q>>,
    /// Endpoint ids of `g` index this list instead, when present.
    companions: Option<Vec<Polynomial<Q>>>,
}

impl PencilOracle {
    pub fn new(vertices: Vec<Polynomial<Q>>) -> Self {
        PencilOracle { vertices, companions: None }
    }

    pub fn bipartite(vertices: Vec<Polynomial<Q>>, companions: Vec<Polynomial<Q>>) -> Self {
        PencilOracle { vertices, companions: Some(companions) }
    }

    pub fn pencil(&self, edge: Edge) -> Option<Pencil> {
        let f = self.vertices.get(edge.f as usize)?;
        let g = self.companions.as_ref().unwrap_or(&self.vertices).get(edge.g as usize)?;
        Some(Pencil::from_smooth(f.clone(), g.clone()))
    }
}

impl EdgeOracle for PencilOracle {
    fn attempt(&self, edge: Edge, budget: Duration, cancel: &CancelToken) -> OracleReport {
        let Some(e) = self.pencil(edge) else {
            return OracleReport { kind: AttemptKind::Failed, elapsed: None, detail: Some("unknown vertex".into()) };
        };
        let mut meter = Meter::new(&Budget::seconds(budget.as_secs_f64())).with_cancel(cancel.clone());
        match first_ode_with(&e, &mut meter) {
            Outcome::Success { operator, .. } => OracleReport {
                kind: AttemptKind::Success,
                elapsed: None,
                detail: Some(format!("order {} degree {}", operator.order(), operator.degree())),
            },
            Outcome::Timeout { .. } => OracleReport::of(AttemptKind::Timeout),
            Outcome::SingularFamily { detail, .. } => {
                OracleReport { kind: AttemptKind::Failed, elapsed: None, detail: Some(detail) }
            }
        }
    }
}
