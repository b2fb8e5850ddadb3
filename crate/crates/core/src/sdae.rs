//! Greedy layer-wise pretraining of an encoder stack and its unrolling
//! into a feed-forward classifier.
//!
//! Each layer is trained as a denoising autoencoder on the clean
//! (uncorrupted) encoding produced by the layers below it; corruption is
//! applied only to that layer's own input and only while it trains.
//! Unrolling copies the encoder weights and biases verbatim, drops the
//! decoder biases, and appends a randomly initialized single-unit output
//! layer.

use crate::autoencoder::{Corruption, DaeLayer, LossKind, TrainReport};
use crate::config::TrainConfig;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Rng};
use crate::net::{DenseLayer, FeedForwardNet};

/// Everything needed to pretrain one layer of the stack.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerSpec {
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub corruption: Corruption,
    pub loss: LossKind,
    pub train: TrainConfig,
}

/// Default pretraining profile: 18 -> 14 with masking fraction 0.4,
/// learning rate 1, momentum 0.1, then 14 -> 8 with masking fraction 0.1,
/// learning rate 0.5, momentum 0.1.
pub fn default_layer_specs(seed: u64) -> Vec<LayerSpec> {
    let level = |input_dim, hidden_dim, fraction, learning_rate, tag| LayerSpec {
        input_dim,
        hidden_dim,
        corruption: Corruption::Masking { fraction },
        loss: LossKind::SquaredError,
        train: TrainConfig {
            learning_rate,
            momentum: 0.1,
            l2_penalty: 0.0,
            epochs: DEFAULT_PRETRAIN_EPOCHS,
            batch_size: 10,
            seed: Rng::derive(seed, tag),
        },
    };
    vec![level(18, 14, 0.4, 1.0, 1), level(14, 8, 0.1, 0.5, 2)]
}

/// Default fine-tuning profile: 2000 epochs, L2 penalty 0.0007,
/// learning rate 1, momentum 0.5.
pub fn default_finetune_config(seed: u64) -> TrainConfig {
    TrainConfig {
        learning_rate: 1.0,
        momentum: 0.5,
        l2_penalty: 0.0007,
        epochs: 2000,
        batch_size: 10,
        seed,
    }
}

/// Layer widths of the default classifier, input first.
pub const DEFAULT_ARCHITECTURE: [usize; 4] = [18, 14, 8, 1];

/// Pretraining epoch count per layer when nothing else is requested.
pub const DEFAULT_PRETRAIN_EPOCHS: usize = 100;

/// Loss traces and the order in which layers finished training.
#[derive(Debug, Clone, PartialEq)]
pub struct PretrainReport {
    pub layer_traces: Vec<TrainReport>,
    pub trained_order: Vec<usize>,
}

/// An ordered stack of pretrained autoencoder layers.
#[derive(Debug, Clone, PartialEq)]
pub struct SdaeStack {
    layers: Vec<DaeLayer>,
}

impl SdaeStack {
    pub fn empty() -> Self {
        SdaeStack { layers: Vec::new() }
    }

    pub fn from_layers(layers: Vec<DaeLayer>) -> Result<Self> {
        for pair in layers.windows(2) {
            if pair[0].hidden_dim() != pair[1].input_dim() {
                return Err(Error::Config(format!(
                    "stack dimensions do not chain: {} -> {}",
                    pair[0].hidden_dim(),
                    pair[1].input_dim()
                )));
            }
        }
        Ok(SdaeStack { layers })
    }

    pub fn layers(&self) -> &[DaeLayer] {
        &self.layers
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    /// Layer widths joined with dashes, e.g. "18-14-8".
    pub fn architecture(&self) -> String {
        if self.layers.is_empty() {
            return String::new();
        }
        let mut parts = vec![self.layers[0].input_dim().to_string()];
        parts.extend(self.layers.iter().map(|l| l.hidden_dim().to_string()));
        parts.join("-")
    }

    /// Composition of every encoder in order; the empty stack is the
    /// identity.
    pub fn represent(&self, x: &Matrix) -> Result<Matrix> {
        let mut current = x.clone();
        for layer in &self.layers {
            current = layer.encode(&current)?;
        }
        Ok(current)
    }

    /// Feed-forward classifier whose hidden layers reuse the pretrained
    /// encoder parameters bit for bit. Decoder biases are dropped; a new
    /// final layer (last hidden width -> 1) is drawn from `rng`.
    pub fn unroll(&self, rng: &mut Rng) -> Result<FeedForwardNet> {
        let last = self
            .layers
            .last()
            .ok_or_else(|| Error::Config("cannot unroll an empty stack".into()))?;
        let mut dense: Vec<DenseLayer> = self
            .layers
            .iter()
            .map(|l| DenseLayer {
                weights: l.weights().clone(),
                bias: l.bias_hidden().to_vec(),
            })
            .collect();
        dense.push(DenseLayer::random(last.hidden_dim(), 1, rng)?);
        FeedForwardNet::from_layers(dense)
    }
}

/// Trains the stack one layer at a time, bottom to top. Layer i trains on
/// the clean encoding of the data through layers 0..i.
pub fn pretrain(
    specs: &[LayerSpec],
    unlabeled: &Matrix,
    rng: &mut Rng,
) -> Result<(SdaeStack, PretrainReport)> {
    for pair in specs.windows(2) {
        if pair[0].hidden_dim != pair[1].input_dim {
            return Err(Error::Config(format!(
                "layer specs do not chain: {} -> {}",
                pair[0].hidden_dim, pair[1].input_dim
            )));
        }
    }
    if let Some(first) = specs.first() {
        if unlabeled.cols() != first.input_dim {
            return Err(Error::Config(format!(
                "data has {} features but the first layer expects {}",
                unlabeled.cols(),
                first.input_dim
            )));
        }
    }

    let mut layers = Vec::with_capacity(specs.len());
    let mut layer_traces = Vec::with_capacity(specs.len());
    let mut trained_order = Vec::with_capacity(specs.len());
    let mut input = unlabeled.clone();
    for (index, spec) in specs.iter().enumerate() {
        let mut layer = DaeLayer::new(spec.input_dim, spec.hidden_dim, rng)?;
        let trace = layer.train(&input, &spec.corruption, spec.loss, &spec.train, rng)?;
        input = layer.encode(&input)?;
        layers.push(layer);
        layer_traces.push(trace);
        trained_order.push(index);
    }
    Ok((
        SdaeStack { layers },
        PretrainReport {
            layer_traces,
            trained_order,
        },
    ))
}
