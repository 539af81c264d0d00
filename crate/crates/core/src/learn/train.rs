use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::network::{Network, NetworkSpec, Sample};
use super::LearnError;

/// Step size `gamma(k)` at iteration `k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepSchedule {
    Constant { gamma: f64 },
    /// `gamma / (1 + decay * k)`
    InverseTime { gamma: f64, decay: f64 },
}

impl StepSchedule {
    pub fn at(&self, k: usize) -> f64 {
        match *self {
            StepSchedule::Constant { gamma } => gamma,
            StepSchedule::InverseTime { gamma, decay } => gamma / (1.0 + decay * k as f64),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub step: StepSchedule,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    pub init_scale: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { step: StepSchedule::Constant { gamma: 1e-3 }, batch_size: 32, epochs: 100, seed: 0, init_scale: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trained {
    pub network: Network,
    /// Mean full-data loss after each epoch.
    pub loss_trace: Vec<f64>,
    pub iterations: usize,
}

/// Initializes from `config.seed` and runs minibatch descent.
pub fn train(spec: NetworkSpec, config: &TrainConfig, data: &[Sample]) -> Result<Trained, LearnError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let net = Network::init(spec, &mut rng, config.init_scale)?;
    descend(net, config, data, &mut rng)
}

/// Continues descent from `net`; minibatches are drawn from `config.seed`.
pub fn train_from(net: Network, config: &TrainConfig, data: &[Sample]) -> Result<Trained, LearnError> {
    descend(net, config, data, &mut ChaCha8Rng::seed_from_u64(config.seed))
}

/// `A(k) = A(k-1) - gamma(k) grad L(A(k-1); T_k)` with `T_k` a uniform
/// subset of size `b`. An epoch is `ceil(n / b)` iterations.
fn descend(mut net: Network, config: &TrainConfig, data: &[Sample], rng: &mut ChaCha8Rng) -> Result<Trained, LearnError> {
    if data.is_empty() {
        return Err(LearnError::EmptyBatch);
    }
    if config.batch_size == 0 {
        return Err(LearnError::Spec("batch size must be positive".into()));
    }
    let n = data.len();
    let b = config.batch_size.min(n);
    let per_epoch = n.div_ceil(b);
    let mut loss_trace = Vec::with_capacity(config.epochs);
    let mut k = 0;
    let mut batch = Vec::with_capacity(b);
    for _ in 0..config.epochs {
        for _ in 0..per_epoch {
            k += 1;
            let gamma = config.step.at(k);
            if !(gamma >= 0.0 && gamma.is_finite()) {
                return Err(LearnError::Spec(format!("step size {gamma} at iteration {k}")));
            }
            batch.clear();
            batch.extend(sample(rng, n, b).into_iter().map(|i| data[i].clone()));
            let (loss, grad) = net.gradient(&batch)?;
            if !loss.is_finite() {
                return Err(LearnError::Diverged { iteration: k });
            }
            for (p, g) in net.params_mut().iter_mut().zip(&grad) {
                *p -= gamma * g;
            }
            if net.params().iter().any(|p| !p.is_finite()) {
                return Err(LearnError::Diverged { iteration: k });
            }
        }
        let epoch_loss = net.loss(data)? / n as f64;
        if !epoch_loss.is_finite() {
            return Err(LearnError::Diverged { iteration: k });
        }
        loss_trace.push(epoch_loss);
    }
    Ok(Trained { network: net, loss_trace, iterations: k })
}
