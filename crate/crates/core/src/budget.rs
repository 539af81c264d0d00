//! Wall-clock and step budgets shared by the Gröbner engine, the ODE oracle
//! and the scheduler.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

/// Cooperative cancellation flag, cheap to clone across threads.
#[derive(Debug, Clone, Default)]
pub struct CancelToken(Arc<AtomicBool>);

impl CancelToken {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, Ordering::Release);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(Ordering::Acquire)
    }
}

/// Limits for one budgeted computation. Either limit may trip first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    pub wall_clock: Duration,
    pub step_limit: u64,
}

impl Budget {
    pub fn seconds(secs: f64) -> Self {
        Budget { wall_clock: Duration::from_secs_f64(secs), step_limit: u64::MAX }
    }

    pub fn with_steps(mut self, steps: u64) -> Self {
        self.step_limit = steps;
        self
    }

    pub fn unlimited() -> Self {
        Budget { wall_clock: Duration::from_secs(u64::MAX / 4), step_limit: u64::MAX }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum Exhausted {
    #[error("wall-clock budget exhausted")]
    Time,
    #[error("step budget exhausted")]
    Steps,
    #[error("cancelled")]
    Cancelled,
}

/// Running meter against a [`Budget`]; checked at iteration boundaries.
#[derive(Debug, Clone)]
pub struct Meter {
    start: Instant,
    deadline: Option<Instant>,
    step_limit: u64,
    steps: u64,
    cancel: Option<CancelToken>,
}

impl Meter {
    pub fn new(budget: &Budget) -> Self {
        let start = Instant::now();
        Meter {
            start,
            deadline: start.checked_add(budget.wall_clock),
            step_limit: budget.step_limit,
            steps: 0,
            cancel: None,
        }
    }

    pub fn unlimited() -> Self {
        Meter::new(&Budget::unlimited())
    }

    pub fn with_cancel(mut self, cancel: CancelToken) -> Self {
        self.cancel = Some(cancel);
        self
    }

    pub fn elapsed(&self) -> Duration {
        self.start.elapsed()
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Counts one step and reports whether any limit has tripped.
    pub fn step(&mut self) -> Result<(), Exhausted> {
        self.steps += 1;
        if self.steps > self.step_limit {
            return Err(Exhausted::Steps);
        }
        self.check()
    }

    pub fn check(&self) -> Result<(), Exhausted> {
        if let Some(c) = &self.cancel {
            if c.is_cancelled() {
                return Err(Exhausted::Cancelled);
            }
        }
        if let Some(d) = self.deadline {
            if Instant::now() >= d {
                return Err(Exhausted::Time);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_limit_trips() {
        let mut m = Meter::new(&Budget::seconds(100.0).with_steps(3));
        assert!(m.step().is_ok());
        assert!(m.step().is_ok());
        assert!(m.step().is_ok());
        assert_eq!(m.step(), Err(Exhausted::Steps));
    }

    #[test]
    fn deadline_and_cancel() {
        let m = Meter::new(&Budget::seconds(0.0));
        assert_eq!(m.check(), Err(Exhausted::Time));
        let c = CancelToken::new();
        let m = Meter::unlimited().with_cancel(c.clone());
        assert!(m.check().is_ok());
        c.cancel();
        assert_eq!(m.check(), Err(Exhausted::Cancelled));
    }
}
