use serde::{Deserialize, Serialize};

use crate::features::FeatureRecord;

use super::network::{Activation, LayerSpec, Network, NetworkSpec, Shape};
use super::LearnError;

/// Five ReLU hidden layers, the first three of `widths` then two of 100.
pub fn default_mlp_spec(inputs: usize, widths: [usize; 3]) -> NetworkSpec {
    NetworkSpec::mlp(inputs, &[widths[0], widths[1], widths[2], 100, 100])
}

/// Two 3x3 convolutions (8 then 16 channels) each followed by 2x2 max
/// pooling, a dense layer of 64 and a sigmoid output.
pub fn default_cnn_spec(channels: usize, size: usize) -> NetworkSpec {
    let relu = Activation::Relu;
    NetworkSpec {
        input: Shape::image(channels, size, size),
        layers: vec![
            LayerSpec::Conv { channels: 8, kernel: 3, stride: 1, activation: relu },
            LayerSpec::MaxPool { size: 2 },
            LayerSpec::Conv { channels: 16, kernel: 3, stride: 1, activation: relu },
            LayerSpec::MaxPool { size: 2 },
            LayerSpec::Dense { width: 64, activation: relu },
            LayerSpec::Dense { width: 1, activation: Activation::Sigmoid },
        ],
    }
}

/// Product of an MLP on PCA vectors and a CNN on height channels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleModel {
    pub mlp: Network,
    pub cnn: Network,
}

impl EnsembleModel {
    pub fn score(&self, pca: &[f64], channels: &[f64]) -> Result<f64, LearnError> {
        Ok(self.mlp.score(pca)? * self.cnn.score(channels)?)
    }
}

pub fn ensemble_score(model: &EnsembleModel, record: &FeatureRecord) -> Result<f64, LearnError> {
    let pca = record.pca.as_deref().ok_or(LearnError::MissingPca)?;
    model.score(pca, &record.channels.flatten())
}
