//! Feed-forward classifier with sigmoid units throughout.
//!
//! Built either from scratch (random initialization near zero) or by
//! unrolling a pretrained encoder stack. Fine-tuning is mini-batch SGD
//! with classical momentum, an optional L2 penalty on weights (never on
//! biases), and binary cross-entropy or squared error at the single
//! sigmoid output.

use crate::autoencoder::LossKind;
use crate::config::TrainConfig;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Rng};

const LOG_MARGIN: f64 = 1e-12;

/// One fully connected layer: weights are (outputs x inputs), and the
/// activation is always the sigmoid.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

impl DenseLayer {
    pub fn random(inputs: usize, outputs: usize, rng: &mut Rng) -> Result<Self> {
        let limit = 1.0 / (inputs as f64).sqrt();
        Ok(DenseLayer {
            weights: rng.uniform_matrix(outputs, inputs, -limit, limit)?,
            bias: vec![0.0; outputs],
        })
    }

    pub fn inputs(&self) -> usize {
        self.weights.cols()
    }

    pub fn outputs(&self) -> usize {
        self.weights.rows()
    }

    fn forward(&self, x: &Matrix) -> Result<Matrix> {
        Ok(x.matmul_bt(&self.weights)?.add_row(&self.bias)?.sigmoid())
    }
}

/// Gradient of the training loss for one layer, averaged over the batch.
#[derive(Debug, Clone)]
pub struct LayerGradients {
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

/// Per-epoch training loss and accuracy, in training order.
#[derive(Debug, Clone, PartialEq)]
pub struct FinetuneReport {
    pub epoch_loss: Vec<f64>,
    pub epoch_accuracy: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeedForwardNet {
    layers: Vec<DenseLayer>,
}

impl FeedForwardNet {
    /// Randomly initialized net; `dims` lists every layer width,
    /// e.g. `[18, 14, 8, 1]`.
    pub fn random(dims: &[usize], rng: &mut Rng) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::Config(
                "a network needs at least an input and an output width".into(),
            ));
        }
        if dims.contains(&0) {
            return Err(Error::Config("layer widths must be positive".into()));
        }
        let mut layers = Vec::with_capacity(dims.len() - 1);
        for pair in dims.windows(2) {
            layers.push(DenseLayer::random(pair[0], pair[1], rng)?);
        }
        Ok(FeedForwardNet { layers })
    }

    pub fn from_layers(layers: Vec<DenseLayer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Config("a network needs at least one layer".into()));
        }
        for pair in layers.windows(2) {
            if pair[0].outputs() != pair[1].inputs() {
                return Err(Error::Config(format!(
                    "layer widths do not chain: {} -> {}",
                    pair[0].outputs(),
                    pair[1].inputs()
                )));
            }
        }
        Ok(FeedForwardNet { layers })
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().expect("nonempty").outputs()
    }

    /// Width of every layer joined with dashes, e.g. "18-14-8-1".
    pub fn architecture(&self) -> String {
        let mut parts = vec![self.input_dim().to_string()];
        parts.extend(self.layers.iter().map(|l| l.outputs().to_string()));
        parts.join("-")
    }

    /// Activations of every layer, starting with the input batch itself.
    fn activations(&self, x: &Matrix) -> Result<Vec<Matrix>> {
        if x.cols() != self.input_dim() {
            return Err(Error::shape("forward", x.shape(), self.layers[0].weights.shape()));
        }
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        acts.push(x.clone());
        for layer in &self.layers {
            let next = layer.forward(acts.last().expect("nonempty"))?;
            acts.push(next);
        }
        Ok(acts)
    }

    pub fn forward(&self, x: &Matrix) -> Result<Matrix> {
        Ok(self.activations(x)?.pop().expect("nonempty"))
    }

    /// Mean training loss of the current parameters on a labeled batch.
    pub fn training_loss(&self, x: &Matrix, labels: &[u8], kind: LossKind) -> Result<f64> {
        let output = self.forward(x)?;
        batch_loss(&output, labels, kind)
    }

    /// Backpropagated gradients of the mean training loss, together with
    /// the loss value and the number of correctly classified samples from
    /// the same forward pass.
    pub fn gradients(
        &self,
        x: &Matrix,
        labels: &[u8],
        kind: LossKind,
    ) -> Result<(Vec<LayerGradients>, f64, usize)> {
        if labels.len() != x.rows() {
            return Err(Error::Param(format!(
                "{} labels for {} samples",
                labels.len(),
                x.rows()
            )));
        }
        if self.output_dim() != 1 {
            return Err(Error::Param(format!(
                "training requires a single output unit, net has {}",
                self.output_dim()
            )));
        }
        if x.rows() == 0 {
            return Err(Error::Param("gradient of an empty batch".into()));
        }

        let acts = self.activations(x)?;
        let output = acts.last().expect("nonempty");
        let loss = batch_loss(output, labels, kind)?;
        let correct = output
            .data()
            .iter()
            .zip(labels)
            .filter(|(&score, &label)| classify(score) == label)
            .count();

        let inv_n = 1.0 / x.rows() as f64;
        let delta_data: Vec<f64> = match kind {
            // Sigmoid derivative cancels against the cross-entropy
            // denominator, leaving (a - t) / n.
            LossKind::CrossEntropy => output
                .data()
                .iter()
                .zip(labels)
                .map(|(&a, &t)| (a - t as f64) * inv_n)
                .collect(),
            LossKind::SquaredError => output
                .data()
                .iter()
                .zip(labels)
                .map(|(&a, &t)| 2.0 * (a - t as f64) * a * (1.0 - a) * inv_n)
                .collect(),
        };
        let mut delta = Matrix::from_vec(x.rows(), 1, delta_data)?;

        let mut grads = vec![
            LayerGradients {
                weights: Matrix::zeros(0, 0),
                bias: Vec::new(),
            };
            self.layers.len()
        ];
        for l in (0..self.layers.len()).rev() {
            grads[l] = LayerGradients {
                weights: delta.matmul_at(&acts[l])?,
                bias: delta.column_sums(),
            };
            if l > 0 {
                let gate = acts[l].hadamard(&acts[l].map(|v| 1.0 - v))?;
                delta = delta.matmul(&self.layers[l].weights)?.hadamard(&gate)?;
            }
        }
        Ok((grads, loss, correct))
    }

    /// Supervised backpropagation with momentum and L2 on weights:
    /// v <- mu v - eta (g + lambda W); W <- W + v. Mini-batches are drawn
    /// from a per-epoch shuffle seeded by `cfg.seed`.
    pub fn finetune(
        &mut self,
        x: &Matrix,
        labels: &[u8],
        cfg: &TrainConfig,
        kind: LossKind,
    ) -> Result<FinetuneReport> {
        cfg.validate()?;
        if x.rows() == 0 {
            return Err(Error::Param("labeled training set is empty".into()));
        }
        if labels.len() != x.rows() {
            return Err(Error::Param(format!(
                "{} labels for {} samples",
                labels.len(),
                x.rows()
            )));
        }

        let n = x.rows();
        let mut shuffle_rng = Rng::new(cfg.seed);
        let mut velocity: Vec<LayerGradients> = self
            .layers
            .iter()
            .map(|l| LayerGradients {
                weights: Matrix::zeros(l.outputs(), l.inputs()),
                bias: vec![0.0; l.outputs()],
            })
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        let mut epoch_loss = Vec::with_capacity(cfg.epochs);
        let mut epoch_accuracy = Vec::with_capacity(cfg.epochs);

        for epoch in 0..cfg.epochs {
            shuffle_rng.shuffle(&mut order);
            let mut loss_sum = 0.0;
            let mut correct_sum = 0usize;
            for batch in order.chunks(cfg.batch_size) {
                let bx = x.select_rows(batch);
                let by: Vec<u8> = batch.iter().map(|&i| labels[i]).collect();
                let (grads, loss, correct) = self.gradients(&bx, &by, kind)?;
                loss_sum += loss * batch.len() as f64;
                correct_sum += correct;

                for ((layer, vel), grad) in
                    self.layers.iter_mut().zip(&mut velocity).zip(&grads)
                {
                    step_layer(layer, vel, grad, cfg);
                }
            }
            for layer in &self.layers {
                if !layer.weights.is_finite() || !layer.bias.iter().all(|v| v.is_finite()) {
                    return Err(Error::Numeric(format!(
                        "non-finite network parameters after epoch {}",
                        epoch + 1
                    )));
                }
            }
            epoch_loss.push(loss_sum / n as f64);
            epoch_accuracy.push(correct_sum as f64 / n as f64);
        }
        Ok(FinetuneReport {
            epoch_loss,
            epoch_accuracy,
        })
    }

    /// Scores are the raw sigmoid outputs; the label is whichever of
    /// {0, 1} the score is nearer to, with an exact 0.5 reading as 1.
    pub fn predict(&self, x: &Matrix) -> Result<(Vec<u8>, Vec<f64>)> {
        if self.output_dim() != 1 {
            return Err(Error::Param(format!(
                "prediction requires a single output unit, net has {}",
                self.output_dim()
            )));
        }
        let output = self.forward(x)?;
        let scores: Vec<f64> = output.data().to_vec();
        let labels = scores.iter().map(|&s| classify(s)).collect();
        Ok((labels, scores))
    }
}

fn classify(score: f64) -> u8 {
    u8::from(score >= 0.5)
}

/// One momentum step. The L2 penalty enters the weight velocity only;
/// bias updates never see it.
fn step_layer(
    layer: &mut DenseLayer,
    vel: &mut LayerGradients,
    grad: &LayerGradients,
    cfg: &TrainConfig,
) {
    vel.weights.scale_assign(cfg.momentum);
    vel.weights.axpy(-cfg.learning_rate, &grad.weights);
    if cfg.l2_penalty > 0.0 {
        vel.weights
            .axpy(-cfg.learning_rate * cfg.l2_penalty, &layer.weights);
    }
    layer.weights.axpy(1.0, &vel.weights);
    for ((b, v), g) in layer.bias.iter_mut().zip(&mut vel.bias).zip(&grad.bias) {
        *v = cfg.momentum * *v - cfg.learning_rate * g;
        *b += *v;
    }
}

fn batch_loss(output: &Matrix, labels: &[u8], kind: LossKind) -> Result<f64> {
    if output.rows() != labels.len() || output.cols() != 1 {
        return Err(Error::shape("batch_loss", output.shape(), (labels.len(), 1)));
    }
    let total: f64 = output
        .data()
        .iter()
        .zip(labels)
        .map(|(&a, &label)| {
            let t = label as f64;
            match kind {
                LossKind::SquaredError => (t - a) * (t - a),
                LossKind::CrossEntropy => {
                    let p = a.clamp(LOG_MARGIN, 1.0 - LOG_MARGIN);
                    -(t * p.ln() + (1.0 - t) * (1.0 - p).ln())
                }
            }
        })
        .sum();
    Ok(total / labels.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_net(seed: u64) -> FeedForwardNet {
        FeedForwardNet::random(&[3, 4, 1], &mut Rng::new(seed)).unwrap()
    }

    #[test]
    fn architecture_string_joins_widths() {
        let net = FeedForwardNet::random(&[18, 14, 8, 1], &mut Rng::new(1)).unwrap();
        assert_eq!(net.architecture(), "18-14-8-1");
        assert_eq!(net.input_dim(), 18);
        assert_eq!(net.output_dim(), 1);
    }

    #[test]
    fn random_rejects_degenerate_dims() {
        assert!(FeedForwardNet::random(&[5], &mut Rng::new(1)).is_err());
        assert!(FeedForwardNet::random(&[5, 0, 1], &mut Rng::new(1)).is_err());
    }

    #[test]
    fn from_layers_rejects_broken_chain() {
        let mut rng = Rng::new(2);
        let a = DenseLayer::random(3, 4, &mut rng).unwrap();
        let b = DenseLayer::random(5, 1, &mut rng).unwrap();
        assert!(FeedForwardNet::from_layers(vec![a, b]).is_err());
    }

    #[test]
    fn predict_rounds_towards_nearest_label() {
        // A single zero layer outputs sigmoid(0) = 0.5 exactly.
        let zero = FeedForwardNet::from_layers(vec![DenseLayer {
            weights: Matrix::zeros(1, 2),
            bias: vec![0.0],
        }])
        .unwrap();
        let (labels, scores) = zero.predict(&Matrix::zeros(1, 2)).unwrap();
        assert_eq!(scores, vec![0.5]);
        assert_eq!(labels, vec![1], "ties at 0.5 go to 1");

        let biased = |b: f64| {
            FeedForwardNet::from_layers(vec![DenseLayer {
                weights: Matrix::zeros(1, 2),
                bias: vec![b],
            }])
            .unwrap()
        };
        let (hi, score_hi) = biased(2.2).predict(&Matrix::zeros(1, 2)).unwrap();
        assert!(score_hi[0] > 0.9 && hi == vec![1]);
        let (lo, score_lo) = biased(-2.2).predict(&Matrix::zeros(1, 2)).unwrap();
        assert!(score_lo[0] < 0.1 && lo == vec![0]);
    }

    #[test]
    fn finetune_with_zero_learning_rate_changes_nothing() {
        let mut net = small_net(3);
        let before = net.clone();
        let x = Rng::new(4).uniform_matrix(6, 3, 0.0, 1.0).unwrap();
        let y = vec![0, 1, 0, 1, 1, 0];
        let cfg = TrainConfig {
            learning_rate: 0.0,
            momentum: 0.5,
            l2_penalty: 0.0007,
            epochs: 7,
            batch_size: 2,
            seed: 9,
        };
        net.finetune(&x, &y, &cfg, LossKind::CrossEntropy).unwrap();
        assert_eq!(net, before);
    }

    #[test]
    fn finetune_rejects_empty_labeled_set() {
        let mut net = small_net(3);
        let cfg = TrainConfig {
            learning_rate: 0.1,
            momentum: 0.0,
            l2_penalty: 0.0,
            epochs: 1,
            batch_size: 1,
            seed: 0,
        };
        assert!(net
            .finetune(&Matrix::zeros(0, 3), &[], &cfg, LossKind::CrossEntropy)
            .is_err());
    }

    #[test]
    fn single_separable_sample_is_memorized() {
        let mut net = small_net(5);
        let x = Matrix::from_vec(1, 3, vec![0.9, 0.1, 0.4]).unwrap();
        let y = vec![1];
        let cfg = TrainConfig {
            learning_rate: 0.5,
            momentum: 0.0,
            l2_penalty: 0.0,
            epochs: 500,
            batch_size: 1,
            seed: 0,
        };
        let report = net.finetune(&x, &y, &cfg, LossKind::CrossEntropy).unwrap();
        assert_eq!(*report.epoch_accuracy.last().unwrap(), 1.0);
        let (labels, _) = net.predict(&x).unwrap();
        assert_eq!(labels, vec![1]);
    }

    #[test]
    fn full_batch_plain_descent_matches_manual_oracle_step() {
        // 2-2-1 net, lambda = 0, mu = 0, batch = n: one epoch must equal
        // a single hand-computed full-batch gradient step.
        let mut net = FeedForwardNet::random(&[2, 2, 1], &mut Rng::new(8)).unwrap();
        let reference = net.clone();
        let x = Matrix::from_rows(&[vec![0.2, 0.7], vec![0.9, 0.3], vec![0.5, 0.5]]).unwrap();
        let y = vec![1, 0, 1];
        let eta = 0.3;
        let cfg = TrainConfig {
            learning_rate: eta,
            momentum: 0.0,
            l2_penalty: 0.0,
            epochs: 1,
            batch_size: 3,
            seed: 123,
        };
        net.finetune(&x, &y, &cfg, LossKind::CrossEntropy).unwrap();

        let (grads, _, _) = reference.gradients(&x, &y, LossKind::CrossEntropy).unwrap();
        for (l, (layer, grad)) in reference.layers.iter().zip(&grads).enumerate() {
            let mut expect = layer.weights.clone();
            expect.axpy(-eta, &grad.weights);
            for (a, b) in net.layers[l].weights.data().iter().zip(expect.data()) {
                assert!((a - b).abs() < 1e-10, "layer {l} weight {a} vs {b}");
            }
            for ((a, b), g) in net.layers[l].bias.iter().zip(&layer.bias).zip(&grad.bias) {
                assert!((a - (b - eta * g)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn l2_shrinks_weights_but_never_biases() {
        let mut rng = Rng::new(10);
        let mut layer = DenseLayer::random(3, 2, &mut rng).unwrap();
        layer.bias = vec![0.4, -0.2];
        let before = layer.clone();
        let zero_grad = LayerGradients {
            weights: Matrix::zeros(2, 3),
            bias: vec![0.0, 0.0],
        };
        let mut vel = LayerGradients {
            weights: Matrix::zeros(2, 3),
            bias: vec![0.0, 0.0],
        };
        let cfg = TrainConfig {
            learning_rate: 0.5,
            momentum: 0.0,
            l2_penalty: 0.01,
            epochs: 1,
            batch_size: 1,
            seed: 0,
        };
        step_layer(&mut layer, &mut vel, &zero_grad, &cfg);
        assert_eq!(layer.bias, before.bias);
        for (after, b) in layer.weights.data().iter().zip(before.weights.data()) {
            let expect = b - 0.5 * 0.01 * b;
            assert!((after - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn finetune_is_deterministic_per_seed() {
        let run = || {
            let mut net = FeedForwardNet::random(&[4, 3, 1], &mut Rng::new(21)).unwrap();
            let x = Rng::new(22).uniform_matrix(20, 4, 0.0, 1.0).unwrap();
            let y: Vec<u8> = (0..20).map(|i| (i % 2) as u8).collect();
            let cfg = TrainConfig {
                learning_rate: 0.8,
                momentum: 0.5,
                l2_penalty: 0.0007,
                epochs: 30,
                batch_size: 5,
                seed: 77,
            };
            let report = net.finetune(&x, &y, &cfg, LossKind::CrossEntropy).unwrap();
            (net, report)
        };
        let (n1, r1) = run();
        let (n2, r2) = run();
        assert_eq!(n1, n2);
        assert_eq!(r1, r2);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn gradients_match_central_differences_on_a_small_net() {
        let net = FeedForwardNet::random(&[4, 3, 1], &mut Rng::new(33)).unwrap();
        let x = Rng::new(34).uniform_matrix(3, 4, 0.1, 0.9).unwrap();
        let y = vec![1, 0, 1];
        let h = 1e-5;
        for kind in [LossKind::CrossEntropy, LossKind::SquaredError] {
            let (grads, _, _) = net.gradients(&x, &y, kind).unwrap();
            for l in 0..net.layers.len() {
                let (rows, cols) = net.layers[l].weights.shape();
                for r in 0..rows {
                    for c in 0..cols {
                        let mut plus = net.clone();
                        let mut minus = net.clone();
                        let w = plus.layers[l].weights.get(r, c);
                        plus.layers[l].weights.set(r, c, w + h);
                        minus.layers[l].weights.set(r, c, w - h);
                        let numeric = (plus.training_loss(&x, &y, kind).unwrap()
                            - minus.training_loss(&x, &y, kind).unwrap())
                            / (2.0 * h);
                        let analytic = grads[l].weights.get(r, c);
                        let denom = analytic.abs().max(numeric.abs()).max(1e-6);
                        assert!(
                            ((analytic - numeric) / denom).abs() < 1e-4,
                            "layer {l} w[{r},{c}]: analytic={analytic} numeric={numeric}"
                        );
                    }
                }
                for b in 0..net.layers[l].bias.len() {
                    let mut plus = net.clone();
                    let mut minus = net.clone();
                    plus.layers[l].bias[b] += h;
                    minus.layers[l].bias[b] -= h;
                    let numeric = (plus.training_loss(&x, &y, kind).unwrap()
                        - minus.training_loss(&x, &y, kind).unwrap())
                        / (2.0 * h);
                    let analytic = grads[l].bias[b];
                    let denom = analytic.abs().max(numeric.abs()).max(1e-6);
                    assert!(
                        ((analytic - numeric) / denom).abs() < 1e-4,
                        "layer {l} b[{b}]: analytic={analytic} numeric={numeric}"
                    );
                }
            }
        }
    }
}
