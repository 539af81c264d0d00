//! Feedforward networks trained by minibatch gradient descent, the product
//! ensemble, and ROC evaluation.

mod ensemble;
mod metrics;
mod network;
mod train;

#[cfg(test)]
mod tests;

pub use ensemble::{default_cnn_spec, default_mlp_spec, ensemble_score, EnsembleModel};
pub use metrics::{evaluate, roc, Confusion, Roc, RocPoint};
pub use network::{sigmoid, Activation, LayerSpec, Network, NetworkSpec, Sample, Shape};
pub use train::{train, train_from, StepSchedule, TrainConfig, Trained};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LearnError {
    #[error("expected length {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("invalid network: {0}")]
    Spec(String),
    #[error("empty batch")]
    EmptyBatch,
    #[error("loss diverged at iteration {iteration}")]
    Diverged { iteration: usize },
    #[error("AUC is undefined for a single-class label set")]
    SingleClass,
    #[error("feature record has no PCA vector")]
    MissingPca,
}
