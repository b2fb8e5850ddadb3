//! A single denoising autoencoder layer with tied weights.
//!
//! The encoder maps a visible batch `x` (n x d) to hidden activations
//! `y = sigmoid(x W^T + bias_hidden)` and the decoder reconstructs
//! `z = sigmoid(y W + bias_visible)` from the same weight matrix, so no
//! independent decoder matrix ever exists. Training minimizes the
//! reconstruction error of the clean input from a stochastically corrupted
//! copy; because the weights are tied, the weight gradient accumulates
//! contributions from both the encoder and the decoder path.

use crate::config::TrainConfig;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Rng};

/// Log arguments are clamped at least this far from 0 and 1.
const LOG_MARGIN: f64 = 1e-12;

/// Stochastic corruption applied to a layer's input during training.
#[derive(Debug, Clone, PartialEq)]
pub enum Corruption {
    /// Pass the input through untouched.
    None,
    /// Zero each component independently with the given probability.
    Masking { fraction: f64 },
    /// Add i.i.d. zero-mean Gaussian noise with the given standard deviation.
    Gaussian { stddev: f64 },
}

impl Corruption {
    pub fn masking(fraction: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&fraction) {
            return Err(Error::Param(format!(
                "masking fraction must lie in [0, 1], got {fraction}"
            )));
        }
        Ok(Corruption::Masking { fraction })
    }

    pub fn gaussian(stddev: f64) -> Result<Self> {
        if !(stddev >= 0.0 && stddev.is_finite()) {
            return Err(Error::Param(format!(
                "gaussian stddev must be nonnegative, got {stddev}"
            )));
        }
        Ok(Corruption::Gaussian { stddev })
    }
}

/// Reconstruction error measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    /// Sum of squared differences per sample, averaged over the batch.
    SquaredError,
    /// Bitwise cross-entropy per sample, averaged over the batch. Assumes
    /// targets in [0, 1]; reconstructions are clamped away from {0, 1}
    /// before the logarithm.
    CrossEntropy,
}

/// Per-epoch mean reconstruction loss, in training order.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub epoch_loss: Vec<f64>,
}

/// Gradients of the reconstruction loss with respect to a layer's
/// parameters, averaged over the batch.
#[derive(Debug, Clone)]
pub struct DaeGradients {
    pub weights: Matrix,
    pub bias_hidden: Vec<f64>,
    pub bias_visible: Vec<f64>,
}

/// One autoencoder layer: a (hidden x visible) weight matrix plus encoder
/// and decoder biases. The decoder weight is the transpose of `weights`.
#[derive(Debug, Clone, PartialEq)]
pub struct DaeLayer {
    weights: Matrix,
    bias_hidden: Vec<f64>,
    bias_visible: Vec<f64>,
}

impl DaeLayer {
    /// Random layer with weights uniform in +/- 1/sqrt(input_dim) and
    /// zero biases.
    pub fn new(input_dim: usize, hidden_dim: usize, rng: &mut Rng) -> Result<Self> {
        if input_dim == 0 || hidden_dim == 0 {
            return Err(Error::Config(format!(
                "layer dimensions must be positive, got {input_dim} -> {hidden_dim}"
            )));
        }
        let limit = 1.0 / (input_dim as f64).sqrt();
        let weights = rng.uniform_matrix(hidden_dim, input_dim, -limit, limit)?;
        Ok(DaeLayer {
            weights,
            bias_hidden: vec![0.0; hidden_dim],
            bias_visible: vec![0.0; input_dim],
        })
    }

    pub fn from_parts(weights: Matrix, bias_hidden: Vec<f64>, bias_visible: Vec<f64>) -> Result<Self> {
        if bias_hidden.len() != weights.rows() || bias_visible.len() != weights.cols() {
            return Err(Error::Config(format!(
                "bias lengths {}/{} do not match weight shape {}x{}",
                bias_hidden.len(),
                bias_visible.len(),
                weights.rows(),
                weights.cols()
            )));
        }
        Ok(DaeLayer {
            weights,
            bias_hidden,
            bias_visible,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.weights.cols()
    }

    pub fn hidden_dim(&self) -> usize {
        self.weights.rows()
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn bias_hidden(&self) -> &[f64] {
        &self.bias_hidden
    }

    pub fn bias_visible(&self) -> &[f64] {
        &self.bias_visible
    }

    /// Hidden representation of a visible batch, shape (n x hidden_dim).
    pub fn encode(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.input_dim() {
            return Err(Error::shape("encode", x.shape(), self.weights.shape()));
        }
        Ok(x.matmul_bt(&self.weights)?.add_row(&self.bias_hidden)?.sigmoid())
    }

    /// Reconstruction of a hidden batch, shape (n x input_dim). Uses the
    /// tied weight matrix directly; nothing is transposed or copied.
    pub fn decode(&self, y: &Matrix) -> Result<Matrix> {
        if y.cols() != self.hidden_dim() {
            return Err(Error::shape("decode", y.shape(), self.weights.shape()));
        }
        Ok(y.matmul(&self.weights)?.add_row(&self.bias_visible)?.sigmoid())
    }

    /// Analytic gradients of the reconstruction loss of `x_clean` from
    /// `x_corrupt`, averaged over the batch. Also returns the loss value
    /// from the same forward pass.
    pub fn gradients_with_loss(
        &self,
        x_clean: &Matrix,
        x_corrupt: &Matrix,
        kind: LossKind,
    ) -> Result<(DaeGradients, f64)> {
        if x_clean.shape() != x_corrupt.shape() {
            return Err(Error::shape("dae_gradients", x_clean.shape(), x_corrupt.shape()));
        }
        let n = x_clean.rows();
        if n == 0 {
            return Err(Error::Param("gradient of an empty batch".into()));
        }
        let hidden = self.encode(x_corrupt)?;
        let recon = self.decode(&hidden)?;
        let loss = reconstruction_loss(x_clean, &recon, kind)?;

        let inv_n = 1.0 / n as f64;
        // Derivative of the mean loss through the output sigmoid.
        let delta_visible = match kind {
            LossKind::SquaredError => {
                let diff = recon.sub(x_clean)?;
                let gate = recon.hadamard(&recon.map(|v| 1.0 - v))?;
                diff.hadamard(&gate)?.scale(2.0 * inv_n)
            }
            // The sigmoid derivative cancels against the cross-entropy
            // denominator, leaving (z - x) / n.
            LossKind::CrossEntropy => recon.sub(x_clean)?.scale(inv_n),
        };

        let bias_visible = delta_visible.column_sums();
        let grad_decoder = hidden.matmul_at(&delta_visible)?;

        let gate_hidden = hidden.hadamard(&hidden.map(|v| 1.0 - v))?;
        let delta_hidden = delta_visible.matmul_bt(&self.weights)?.hadamard(&gate_hidden)?;

        let bias_hidden = delta_hidden.column_sums();
        let grad_encoder = delta_hidden.matmul_at(x_corrupt)?;

        let weights = grad_encoder.add(&grad_decoder)?;
        Ok((
            DaeGradients {
                weights,
                bias_hidden,
                bias_visible,
            },
            loss,
        ))
    }

    pub fn gradients(
        &self,
        x_clean: &Matrix,
        x_corrupt: &Matrix,
        kind: LossKind,
    ) -> Result<DaeGradients> {
        self.gradients_with_loss(x_clean, x_corrupt, kind).map(|(g, _)| g)
    }

    /// Mini-batch SGD with classical momentum (v <- mu v - eta g;
    /// theta <- theta + v). The data is shuffled each epoch and fresh
    /// corruption is drawn for every presentation of a sample.
    pub fn train(
        &mut self,
        data: &Matrix,
        corruption: &Corruption,
        kind: LossKind,
        cfg: &TrainConfig,
        rng: &mut Rng,
    ) -> Result<TrainReport> {
        cfg.validate()?;
        if data.rows() == 0 {
            return Err(Error::Param("training data is empty".into()));
        }
        if data.cols() != self.input_dim() {
            return Err(Error::shape("train_dae", data.shape(), self.weights.shape()));
        }

        let n = data.rows();
        let mut vel_w = Matrix::zeros(self.hidden_dim(), self.input_dim());
        let mut vel_bh = vec![0.0; self.hidden_dim()];
        let mut vel_bv = vec![0.0; self.input_dim()];
        let mut order: Vec<usize> = (0..n).collect();
        let mut epoch_loss = Vec::with_capacity(cfg.epochs);

        for epoch in 0..cfg.epochs {
            rng.shuffle(&mut order);
            let mut loss_sum = 0.0;
            for batch in order.chunks(cfg.batch_size) {
                let clean = data.select_rows(batch);
                let corrupted = corrupt(&clean, corruption, rng);
                let (grads, batch_loss) = self.gradients_with_loss(&clean, &corrupted, kind)?;
                loss_sum += batch_loss * batch.len() as f64;

                vel_w.scale_assign(cfg.momentum);
                vel_w.axpy(-cfg.learning_rate, &grads.weights);
                self.weights.axpy(1.0, &vel_w);
                step_bias(&mut self.bias_hidden, &mut vel_bh, &grads.bias_hidden, cfg);
                step_bias(&mut self.bias_visible, &mut vel_bv, &grads.bias_visible, cfg);
            }
            if !self.weights.is_finite()
                || !self.bias_hidden.iter().all(|v| v.is_finite())
                || !self.bias_visible.iter().all(|v| v.is_finite())
            {
                return Err(Error::Numeric(format!(
                    "non-finite layer parameters after epoch {}",
                    epoch + 1
                )));
            }
            epoch_loss.push(loss_sum / n as f64);
        }
        Ok(TrainReport { epoch_loss })
    }
}

fn step_bias(bias: &mut [f64], velocity: &mut [f64], grad: &[f64], cfg: &TrainConfig) {
    for ((b, v), g) in bias.iter_mut().zip(velocity.iter_mut()).zip(grad) {
        *v = cfg.momentum * *v - cfg.learning_rate * g;
        *b += *v;
    }
}

/// Draws a corrupted copy of `x`. `Corruption::None` returns the input
/// unchanged and does not advance the generator.
pub fn corrupt(x: &Matrix, corruption: &Corruption, rng: &mut Rng) -> Matrix {
    match corruption {
        Corruption::None => x.clone(),
        Corruption::Masking { fraction } => x.map_with(|v| {
            if rng.next_f64() < *fraction {
                0.0
            } else {
                v
            }
        }),
        Corruption::Gaussian { stddev } => x.map_with(|v| v + rng.gaussian(*stddev)),
    }
}

/// Reconstruction error between a clean batch and its reconstruction,
/// summed over components and averaged over samples.
pub fn reconstruction_loss(x: &Matrix, z: &Matrix, kind: LossKind) -> Result<f64> {
    if x.shape() != z.shape() {
        return Err(Error::shape("loss", x.shape(), z.shape()));
    }
    if x.rows() == 0 {
        return Err(Error::Param("loss of an empty batch".into()));
    }
    let total: f64 = match kind {
        LossKind::SquaredError => x
            .data()
            .iter()
            .zip(z.data())
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum(),
        LossKind::CrossEntropy => x
            .data()
            .iter()
            .zip(z.data())
            .map(|(&t, &p)| {
                let p = p.clamp(LOG_MARGIN, 1.0 - LOG_MARGIN);
                -(t * p.ln() + (1.0 - t) * (1.0 - p).ln())
            })
            .sum(),
    };
    Ok(total / x.rows() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_layer(input_dim: usize, hidden_dim: usize) -> DaeLayer {
        DaeLayer::from_parts(
            Matrix::zeros(hidden_dim, input_dim),
            vec![0.0; hidden_dim],
            vec![0.0; input_dim],
        )
        .unwrap()
    }

    #[test]
    fn encode_with_zero_parameters_gives_half_everywhere() {
        let layer = zero_layer(3, 2);
        let x = Matrix::from_rows(&[vec![0.3, -1.0, 2.0], vec![5.0, 5.0, 5.0]]).unwrap();
        let y = layer.encode(&x).unwrap();
        assert_eq!(y.shape(), (2, 2));
        assert!(y.data().iter().all(|&v| v == 0.5));
    }

    #[test]
    fn encode_scalar_zero_input() {
        let layer = DaeLayer::from_parts(
            Matrix::from_vec(1, 1, vec![1.0]).unwrap(),
            vec![0.0],
            vec![0.0],
        )
        .unwrap();
        let y = layer.encode(&Matrix::zeros(1, 1)).unwrap();
        assert_eq!(y.get(0, 0), 0.5);
    }

    #[test]
    fn encode_hand_evaluated_case() {
        // sigmoid(0.5 + 0.5 + ln 3 - 1) = sigmoid(ln 3) = 0.75
        let layer = DaeLayer::from_parts(
            Matrix::from_vec(1, 2, vec![1.0, 1.0]).unwrap(),
            vec![3.0_f64.ln() - 1.0],
            vec![0.0, 0.0],
        )
        .unwrap();
        let y = layer.encode(&Matrix::from_vec(1, 2, vec![0.5, 0.5]).unwrap()).unwrap();
        assert!((y.get(0, 0) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn decode_with_zero_parameters_gives_half_everywhere() {
        let layer = zero_layer(4, 2);
        let y = Matrix::from_rows(&[vec![0.9, 0.1]]).unwrap();
        let z = layer.decode(&y).unwrap();
        assert_eq!(z.shape(), (1, 4));
        assert!(z.data().iter().all(|&v| v == 0.5));
    }

    #[test]
    fn decode_hand_evaluated_case() {
        // sigmoid(0.5 * 2 - 1) = sigmoid(0) = 0.5
        let layer = DaeLayer::from_parts(
            Matrix::from_vec(1, 1, vec![2.0]).unwrap(),
            vec![0.0],
            vec![-1.0],
        )
        .unwrap();
        let z = layer.decode(&Matrix::from_vec(1, 1, vec![0.5]).unwrap()).unwrap();
        assert!((z.get(0, 0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn encode_then_decode_restores_shape() {
        let mut rng = Rng::new(1);
        let layer = DaeLayer::new(5, 3, &mut rng).unwrap();
        let x = rng.uniform_matrix(7, 5, 0.0, 1.0).unwrap();
        let z = layer.decode(&layer.encode(&x).unwrap()).unwrap();
        assert_eq!(z.shape(), (7, 5));
        assert!(z.data().iter().all(|&v| v > 0.0 && v < 1.0));
    }

    #[test]
    fn encode_rejects_wrong_width() {
        let layer = zero_layer(3, 2);
        assert!(layer.encode(&Matrix::zeros(1, 4)).is_err());
        assert!(layer.decode(&Matrix::zeros(1, 3)).is_err());
    }

    #[test]
    fn masking_zero_fraction_is_identity() {
        let mut rng = Rng::new(2);
        let x = rng.uniform_matrix(4, 6, -1.0, 1.0).unwrap();
        let c = corrupt(&x, &Corruption::masking(0.0).unwrap(), &mut rng);
        assert_eq!(c.data(), x.data());
    }

    #[test]
    fn masking_full_fraction_zeroes_everything() {
        let mut rng = Rng::new(2);
        let x = rng.uniform_matrix(4, 6, 0.5, 1.0).unwrap();
        let c = corrupt(&x, &Corruption::masking(1.0).unwrap(), &mut rng);
        assert!(c.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn masking_fraction_concentrates_around_nu() {
        let x = Matrix::from_vec(10_000, 18, vec![1.0; 180_000]).unwrap();
        let mut rng = Rng::new(3);
        let c = corrupt(&x, &Corruption::masking(0.4).unwrap(), &mut rng);
        let zeros = c.data().iter().filter(|&&v| v == 0.0).count() as f64;
        let fraction = zeros / c.data().len() as f64;
        assert!((fraction - 0.4).abs() < 0.01, "fraction={fraction}");
    }

    #[test]
    fn none_corruption_is_bit_exact_identity() {
        let mut rng = Rng::new(4);
        let x = rng.uniform_matrix(3, 3, -5.0, 5.0).unwrap();
        let before = rng.clone();
        let c = corrupt(&x, &Corruption::None, &mut rng);
        assert_eq!(c.data(), x.data());
        // The generator is untouched.
        assert_eq!(rng.next_u64(), before.clone().next_u64());
    }

    #[test]
    fn corruption_spec_validation() {
        assert!(Corruption::masking(1.5).is_err());
        assert!(Corruption::masking(-0.1).is_err());
        assert!(Corruption::gaussian(-1.0).is_err());
        assert!(Corruption::masking(0.4).is_ok());
        assert!(Corruption::gaussian(0.0).is_ok());
    }

    #[test]
    fn squared_error_of_identical_matrices_is_zero() {
        let x = Matrix::from_rows(&[vec![0.25, 0.5]]).unwrap();
        assert_eq!(reconstruction_loss(&x, &x, LossKind::SquaredError).unwrap(), 0.0);
    }

    #[test]
    fn squared_error_unit_displacement() {
        let x = Matrix::from_vec(1, 2, vec![1.0, 0.0]).unwrap();
        let z = Matrix::zeros(1, 2);
        assert_eq!(reconstruction_loss(&x, &z, LossKind::SquaredError).unwrap(), 1.0);
    }

    #[test]
    fn cross_entropy_fixed_case_is_ln_two() {
        let x = Matrix::from_vec(1, 1, vec![1.0]).unwrap();
        let z = Matrix::from_vec(1, 1, vec![0.5]).unwrap();
        let loss = reconstruction_loss(&x, &z, LossKind::CrossEntropy).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn cross_entropy_clamps_degenerate_reconstructions() {
        let x = Matrix::from_vec(1, 1, vec![1.0]).unwrap();
        let z = Matrix::from_vec(1, 1, vec![0.0]).unwrap();
        let loss = reconstruction_loss(&x, &z, LossKind::CrossEntropy).unwrap();
        assert!(loss.is_finite() && loss > 0.0);
    }

    #[test]
    fn loss_rejects_shape_mismatch() {
        let x = Matrix::zeros(1, 2);
        let z = Matrix::zeros(2, 1);
        assert!(reconstruction_loss(&x, &z, LossKind::SquaredError).is_err());
    }

    #[test]
    fn squared_error_matches_scalar_loop_oracle() {
        let mut rng = Rng::new(6);
        for _ in 0..10 {
            let x = rng.uniform_matrix(4, 5, 0.0, 1.0).unwrap();
            let z = rng.uniform_matrix(4, 5, 0.0, 1.0).unwrap();
            let got = reconstruction_loss(&x, &z, LossKind::SquaredError).unwrap();
            let mut want = 0.0;
            for i in 0..4 {
                for j in 0..5 {
                    let d = x.get(i, j) - z.get(i, j);
                    want += d * d;
                }
            }
            want /= 4.0;
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn gradients_vanish_at_perfect_reconstruction() {
        // Zero parameters reconstruct 0.5 exactly; a clean input of all
        // 0.5 therefore sits at a stationary point of the squared error.
        let layer = zero_layer(3, 2);
        let x = Matrix::from_vec(2, 3, vec![0.5; 6]).unwrap();
        let x_tilde = Matrix::from_rows(&[vec![0.1, 0.9, 0.4], vec![0.0, 0.0, 1.0]]).unwrap();
        let grads = layer.gradients(&x, &x_tilde, LossKind::SquaredError).unwrap();
        assert!(grads.weights.data().iter().all(|&v| v == 0.0));
        assert!(grads.bias_hidden.iter().all(|&v| v == 0.0));
        assert!(grads.bias_visible.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn duplicating_the_batch_leaves_mean_gradients_unchanged() {
        let mut rng = Rng::new(8);
        let layer = DaeLayer::new(4, 3, &mut rng).unwrap();
        let x = rng.uniform_matrix(3, 4, 0.1, 0.9).unwrap();
        let xc = corrupt(&x, &Corruption::masking(0.3).unwrap(), &mut rng);
        let doubled_idx: Vec<usize> = (0..3).chain(0..3).collect();
        let x2 = x.select_rows(&doubled_idx);
        let xc2 = xc.select_rows(&doubled_idx);
        for kind in [LossKind::SquaredError, LossKind::CrossEntropy] {
            let g1 = layer.gradients(&x, &xc, kind).unwrap();
            let g2 = layer.gradients(&x2, &xc2, kind).unwrap();
            for (a, b) in g1.weights.data().iter().zip(g2.weights.data()) {
                assert!((a - b).abs() < 1e-12);
            }
            for (a, b) in g1.bias_hidden.iter().zip(&g2.bias_hidden) {
                assert!((a - b).abs() < 1e-12);
            }
            for (a, b) in g1.bias_visible.iter().zip(&g2.bias_visible) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn gradients_match_central_differences() {
        let mut rng = Rng::new(14);
        let layer = DaeLayer::from_parts(
            rng.uniform_matrix(4, 6, -0.5, 0.5).unwrap(),
            (0..4).map(|_| rng.uniform(-0.5, 0.5)).collect(),
            (0..6).map(|_| rng.uniform(-0.5, 0.5)).collect(),
        )
        .unwrap();
        let x = rng.uniform_matrix(3, 6, 0.05, 0.95).unwrap();
        let x_tilde = corrupt(&x, &Corruption::masking(0.4).unwrap(), &mut rng);
        let h = 1e-5;

        let loss_of = |layer: &DaeLayer, kind| {
            let recon = layer.decode(&layer.encode(&x_tilde).unwrap()).unwrap();
            reconstruction_loss(&x, &recon, kind).unwrap()
        };
        for kind in [LossKind::SquaredError, LossKind::CrossEntropy] {
            let grads = layer.gradients(&x, &x_tilde, kind).unwrap();
            let check = |analytic: f64, numeric: f64, what: &str| {
                let denom = analytic.abs().max(numeric.abs()).max(1e-6);
                assert!(
                    ((analytic - numeric) / denom).abs() < 1e-4,
                    "{what}: analytic={analytic} numeric={numeric}"
                );
            };
            for r in 0..4 {
                for c in 0..6 {
                    let mut plus = layer.clone();
                    let mut minus = layer.clone();
                    plus.weights.set(r, c, layer.weights.get(r, c) + h);
                    minus.weights.set(r, c, layer.weights.get(r, c) - h);
                    let numeric = (loss_of(&plus, kind) - loss_of(&minus, kind)) / (2.0 * h);
                    check(grads.weights.get(r, c), numeric, &format!("w[{r},{c}]"));
                }
            }
            for i in 0..4 {
                let mut plus = layer.clone();
                let mut minus = layer.clone();
                plus.bias_hidden[i] += h;
                minus.bias_hidden[i] -= h;
                let numeric = (loss_of(&plus, kind) - loss_of(&minus, kind)) / (2.0 * h);
                check(grads.bias_hidden[i], numeric, &format!("b_hidden[{i}]"));
            }
            for i in 0..6 {
                let mut plus = layer.clone();
                let mut minus = layer.clone();
                plus.bias_visible[i] += h;
                minus.bias_visible[i] -= h;
                let numeric = (loss_of(&plus, kind) - loss_of(&minus, kind)) / (2.0 * h);
                check(grads.bias_visible[i], numeric, &format!("b_visible[{i}]"));
            }
        }
    }

    #[test]
    fn train_with_zero_learning_rate_changes_nothing() {
        let mut rng = Rng::new(9);
        let mut layer = DaeLayer::new(4, 2, &mut rng).unwrap();
        let before = layer.clone();
        let data = rng.uniform_matrix(10, 4, 0.0, 1.0).unwrap();
        let cfg = TrainConfig {
            learning_rate: 0.0,
            momentum: 0.0,
            l2_penalty: 0.0,
            epochs: 1,
            batch_size: 5,
            seed: 0,
        };
        layer
            .train(&data, &Corruption::None, LossKind::SquaredError, &cfg, &mut rng)
            .unwrap();
        assert_eq!(layer, before);
    }

    #[test]
    fn train_rejects_zero_epochs_and_empty_data() {
        let mut rng = Rng::new(9);
        let mut layer = DaeLayer::new(2, 2, &mut rng).unwrap();
        let cfg = TrainConfig {
            learning_rate: 0.1,
            momentum: 0.0,
            l2_penalty: 0.0,
            epochs: 0,
            batch_size: 5,
            seed: 0,
        };
        let data = Matrix::zeros(4, 2);
        assert!(layer
            .train(&data, &Corruption::None, LossKind::SquaredError, &cfg, &mut rng)
            .is_err());
        let cfg_ok = TrainConfig { epochs: 1, ..cfg };
        let empty = Matrix::zeros(0, 2);
        assert!(layer
            .train(&empty, &Corruption::None, LossKind::SquaredError, &cfg_ok, &mut rng)
            .is_err());
    }

    #[test]
    fn training_is_deterministic_per_seed() {
        let run = || {
            let mut rng = Rng::new(42);
            let mut layer = DaeLayer::new(6, 4, &mut rng).unwrap();
            let data = Rng::new(77).uniform_matrix(30, 6, 0.0, 1.0).unwrap();
            let cfg = TrainConfig {
                learning_rate: 0.1,
                momentum: 0.1,
                l2_penalty: 0.0,
                epochs: 5,
                batch_size: 10,
                seed: 0,
            };
            let report = layer
                .train(&data, &Corruption::masking(0.4).unwrap(), LossKind::SquaredError, &cfg, &mut rng)
                .unwrap();
            (layer, report)
        };
        let (l1, r1) = run();
        let (l2, r2) = run();
        assert_eq!(l1.weights.data(), l2.weights.data());
        assert_eq!(l1.bias_hidden, l2.bias_hidden);
        assert_eq!(l1.bias_visible, l2.bias_visible);
        assert_eq!(r1.epoch_loss, r2.epoch_loss);
    }

    #[test]
    fn training_reduces_reconstruction_loss() {
        let mut data_rng = Rng::new(55);
        let data = data_rng.uniform_matrix(200, 18, 0.0, 1.0).unwrap();
        let mut rng = Rng::new(56);
        let mut layer = DaeLayer::new(18, 14, &mut rng).unwrap();
        let cfg = TrainConfig {
            learning_rate: 0.1,
            momentum: 0.1,
            l2_penalty: 0.0,
            epochs: 50,
            batch_size: 10,
            seed: 0,
        };
        let report = layer
            .train(&data, &Corruption::masking(0.4).unwrap(), LossKind::SquaredError, &cfg, &mut rng)
            .unwrap();
        let first = report.epoch_loss[0];
        let last = *report.epoch_loss.last().unwrap();
        assert!(last < first, "first={first} last={last}");
    }
}
