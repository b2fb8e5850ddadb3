//! Model file handling.
//!
//! Models are stored as a versioned, self-describing JSON document:
//! format tag, version, kind ("stack" or "net"), architecture descriptor,
//! and per-layer dimensions plus row-major parameter arrays. Floats are
//! written with full round-trip precision, so save followed by load
//! reproduces parameters bit for bit. Loading rejects any document whose
//! dimensions are inconsistent with its own arrays or chain.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::autoencoder::DaeLayer;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::net::{DenseLayer, FeedForwardNet};
use crate::sdae::SdaeStack;

pub const MODEL_FORMAT: &str = "sdae-model";
pub const MODEL_VERSION: u32 = 1;

const KIND_STACK: &str = "stack";
const KIND_NET: &str = "net";

#[derive(Debug, Serialize, Deserialize)]
struct StoredModel {
    format: String,
    version: u32,
    kind: String,
    architecture: String,
    layers: Vec<StoredLayer>,
}

#[derive(Debug, Serialize, Deserialize)]
struct StoredLayer {
    inputs: usize,
    outputs: usize,
    /// Row-major (outputs x inputs).
    weights: Vec<f64>,
    /// Length `outputs`; the encoder bias for stack layers.
    bias: Vec<f64>,
    /// Length `inputs`; present only for stack layers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    decoder_bias: Option<Vec<f64>>,
}

/// Either kind of stored model.
#[derive(Debug, Clone)]
pub enum LoadedModel {
    Stack(SdaeStack),
    Net(FeedForwardNet),
}

impl LoadedModel {
    /// Encoder weight matrices, one per hidden layer, for visualization.
    pub fn weight_matrices(&self) -> Vec<&Matrix> {
        match self {
            LoadedModel::Stack(stack) => stack.layers().iter().map(|l| l.weights()).collect(),
            LoadedModel::Net(net) => net.layers().iter().map(|l| &l.weights).collect(),
        }
    }
}

pub fn save_stack(stack: &SdaeStack, path: &Path) -> Result<()> {
    let doc = StoredModel {
        format: MODEL_FORMAT.into(),
        version: MODEL_VERSION,
        kind: KIND_STACK.into(),
        architecture: stack.architecture(),
        layers: stack
            .layers()
            .iter()
            .map(|l| StoredLayer {
                inputs: l.input_dim(),
                outputs: l.hidden_dim(),
                weights: l.weights().data().to_vec(),
                bias: l.bias_hidden().to_vec(),
                decoder_bias: Some(l.bias_visible().to_vec()),
            })
            .collect(),
    };
    write_doc(&doc, path)
}

pub fn save_net(net: &FeedForwardNet, path: &Path) -> Result<()> {
    let doc = StoredModel {
        format: MODEL_FORMAT.into(),
        version: MODEL_VERSION,
        kind: KIND_NET.into(),
        architecture: net.architecture(),
        layers: net
            .layers()
            .iter()
            .map(|l| StoredLayer {
                inputs: l.inputs(),
                outputs: l.outputs(),
                weights: l.weights.data().to_vec(),
                bias: l.bias.clone(),
                decoder_bias: None,
            })
            .collect(),
    };
    write_doc(&doc, path)
}

pub fn load_stack(path: &Path) -> Result<SdaeStack> {
    match load_model(path)? {
        LoadedModel::Stack(stack) => Ok(stack),
        LoadedModel::Net(_) => Err(model_error(path, "expected a stack model, found a net")),
    }
}

pub fn load_net(path: &Path) -> Result<FeedForwardNet> {
    match load_model(path)? {
        LoadedModel::Net(net) => Ok(net),
        LoadedModel::Stack(_) => Err(model_error(path, "expected a net model, found a stack")),
    }
}

pub fn load_model(path: &Path) -> Result<LoadedModel> {
    let text = fs::read_to_string(path).map_err(|e| Error::io_context(path, e))?;
    let doc: StoredModel =
        serde_json::from_str(&text).map_err(|e| model_error(path, &e.to_string()))?;
    if doc.format != MODEL_FORMAT {
        return Err(model_error(
            path,
            &format!("unknown format tag {:?}", doc.format),
        ));
    }
    if doc.version != MODEL_VERSION {
        return Err(model_error(
            path,
            &format!("unsupported version {} (expected {MODEL_VERSION})", doc.version),
        ));
    }
    if doc.layers.is_empty() {
        return Err(model_error(path, "model has no layers"));
    }
    for (i, layer) in doc.layers.iter().enumerate() {
        if layer.weights.len() != layer.inputs * layer.outputs {
            return Err(model_error(
                path,
                &format!(
                    "layer {}: {} weights for a {}x{} matrix",
                    i,
                    layer.weights.len(),
                    layer.outputs,
                    layer.inputs
                ),
            ));
        }
        if layer.bias.len() != layer.outputs {
            return Err(model_error(
                path,
                &format!("layer {}: {} bias entries for {} units", i, layer.bias.len(), layer.outputs),
            ));
        }
        if !layer.weights.iter().chain(&layer.bias).all(|v| v.is_finite()) {
            return Err(model_error(path, &format!("layer {i}: non-finite parameter")));
        }
    }
    for (i, pair) in doc.layers.windows(2).enumerate() {
        if pair[0].outputs != pair[1].inputs {
            return Err(model_error(
                path,
                &format!(
                    "layers {} and {} do not chain: {} -> {}",
                    i,
                    i + 1,
                    pair[0].outputs,
                    pair[1].inputs
                ),
            ));
        }
    }

    match doc.kind.as_str() {
        KIND_STACK => {
            let mut layers = Vec::with_capacity(doc.layers.len());
            for (i, stored) in doc.layers.into_iter().enumerate() {
                let decoder_bias = stored.decoder_bias.ok_or_else(|| {
                    model_error(path, &format!("stack layer {i} is missing its decoder bias"))
                })?;
                if decoder_bias.len() != stored.inputs {
                    return Err(model_error(
                        path,
                        &format!(
                            "layer {}: {} decoder bias entries for {} inputs",
                            i,
                            decoder_bias.len(),
                            stored.inputs
                        ),
                    ));
                }
                if !decoder_bias.iter().all(|v| v.is_finite()) {
                    return Err(model_error(path, &format!("layer {i}: non-finite parameter")));
                }
                let weights = Matrix::from_vec(stored.outputs, stored.inputs, stored.weights)
                    .map_err(|e| model_error(path, &e.to_string()))?;
                layers.push(
                    DaeLayer::from_parts(weights, stored.bias, decoder_bias)
                        .map_err(|e| model_error(path, &e.to_string()))?,
                );
            }
            let stack =
                SdaeStack::from_layers(layers).map_err(|e| model_error(path, &e.to_string()))?;
            Ok(LoadedModel::Stack(stack))
        }
        KIND_NET => {
            let mut layers = Vec::with_capacity(doc.layers.len());
            for stored in doc.layers {
                let weights = Matrix::from_vec(stored.outputs, stored.inputs, stored.weights)
                    .map_err(|e| model_error(path, &e.to_string()))?;
                layers.push(DenseLayer {
                    weights,
                    bias: stored.bias,
                });
            }
            let net =
                FeedForwardNet::from_layers(layers).map_err(|e| model_error(path, &e.to_string()))?;
            Ok(LoadedModel::Net(net))
        }
        other => Err(model_error(path, &format!("unknown model kind {other:?}"))),
    }
}

fn write_doc(doc: &StoredModel, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(doc)
        .map_err(|e| model_error(path, &e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io_context(path, e))?;
    Ok(())
}

fn model_error(path: &Path, message: &str) -> Error {
    Error::Model {
        path: path.display().to_string(),
        message: message.into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autoencoder::{Corruption, LossKind};
    use crate::config::TrainConfig;
    use crate::linalg::Rng;
    use crate::sdae::{pretrain, LayerSpec};

    fn trained_stack() -> SdaeStack {
        let cfg = TrainConfig {
            learning_rate: 0.5,
            momentum: 0.1,
            l2_penalty: 0.0,
            epochs: 2,
            batch_size: 8,
            seed: 0,
        };
        let specs = vec![
            LayerSpec {
                input_dim: 6,
                hidden_dim: 4,
                corruption: Corruption::Masking { fraction: 0.3 },
                loss: LossKind::SquaredError,
                train: cfg.clone(),
            },
            LayerSpec {
                input_dim: 4,
                hidden_dim: 3,
                corruption: Corruption::Masking { fraction: 0.1 },
                loss: LossKind::SquaredError,
                train: cfg,
            },
        ];
        let data = Rng::new(2).uniform_matrix(30, 6, 0.0, 1.0).unwrap();
        pretrain(&specs, &data, &mut Rng::new(3)).unwrap().0
    }

    #[test]
    fn stack_round_trips_bit_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("stack.json");
        let stack = trained_stack();
        save_stack(&stack, &path).unwrap();
        let loaded = load_stack(&path).unwrap();
        assert_eq!(stack, loaded);
    }

    #[test]
    fn net_round_trips_bit_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.json");
        let net = FeedForwardNet::random(&[6, 4, 1], &mut Rng::new(5)).unwrap();
        save_net(&net, &path).unwrap();
        let loaded = load_net(&path).unwrap();
        assert_eq!(net, loaded);
    }

    #[test]
    fn load_rejects_inconsistent_dimensions() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        let doc = r#"{
            "format": "sdae-model",
            "version": 1,
            "kind": "net",
            "architecture": "2-1",
            "layers": [
                { "inputs": 2, "outputs": 1, "weights": [0.1, 0.2, 0.3], "bias": [0.0] }
            ]
        }"#;
        std::fs::write(&path, doc).unwrap();
        let err = load_net(&path).unwrap_err().to_string();
        assert!(err.contains("3 weights"), "{err}");
    }

    #[test]
    fn load_rejects_broken_chain_and_bad_version() {
        let dir = tempfile::tempdir().unwrap();
        let chain = dir.path().join("chain.json");
        std::fs::write(
            &chain,
            r#"{
            "format": "sdae-model",
            "version": 1,
            "kind": "net",
            "architecture": "2-2-1",
            "layers": [
                { "inputs": 2, "outputs": 2, "weights": [0.1, 0.2, 0.3, 0.4], "bias": [0.0, 0.0] },
                { "inputs": 3, "outputs": 1, "weights": [0.1, 0.2, 0.3], "bias": [0.0] }
            ]
        }"#,
        )
        .unwrap();
        assert!(load_net(&chain).unwrap_err().to_string().contains("chain"));

        let version = dir.path().join("version.json");
        std::fs::write(
            &version,
            r#"{
            "format": "sdae-model",
            "version": 9,
            "kind": "net",
            "architecture": "1-1",
            "layers": [ { "inputs": 1, "outputs": 1, "weights": [0.1], "bias": [0.0] } ]
        }"#,
        )
        .unwrap();
        assert!(load_net(&version)
            .unwrap_err()
            .to_string()
            .contains("version"));
    }

    #[test]
    fn kind_mismatch_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("stack.json");
        save_stack(&trained_stack(), &path).unwrap();
        assert!(load_net(&path).is_err());
        assert!(load_stack(&path).is_ok());
        assert!(matches!(load_model(&path).unwrap(), LoadedModel::Stack(_)));
    }

    #[test]
    fn missing_file_is_an_io_error() {
        let err = load_model(Path::new("/nonexistent/model.json")).unwrap_err();
        assert_eq!(err.class(), crate::error::ErrorClass::Io);
    }
}
