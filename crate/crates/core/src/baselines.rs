//! Comparison classifiers: k-nearest-neighbors, a linear SVM trained by
//! hinge-loss subgradient descent, and a randomly initialized MLP of the
//! same architecture as the pretrained classifier.

use crate::autoencoder::LossKind;
use crate::config::TrainConfig;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Rng};
use crate::net::{FeedForwardNet, FinetuneReport};

/// Stored-sample classifier with Euclidean distance and majority vote.
#[derive(Debug, Clone)]
pub struct KnnModel {
    train_x: Matrix,
    train_y: Vec<u8>,
    k: usize,
}

impl KnnModel {
    /// `k` must be odd so the binary vote cannot tie, and no larger than
    /// the training set.
    pub fn new(train_x: Matrix, train_y: Vec<u8>, k: usize) -> Result<Self> {
        if train_x.rows() == 0 {
            return Err(Error::Param("kNN training set is empty".into()));
        }
        if train_y.len() != train_x.rows() {
            return Err(Error::Param(format!(
                "{} labels for {} samples",
                train_y.len(),
                train_x.rows()
            )));
        }
        if k == 0 || k.is_multiple_of(2) {
            return Err(Error::Param(format!("k must be odd and positive, got {k}")));
        }
        if k > train_x.rows() {
            return Err(Error::Param(format!(
                "k = {k} exceeds {} training samples",
                train_x.rows()
            )));
        }
        Ok(KnnModel { train_x, train_y, k })
    }

    /// Majority vote among the k nearest training points. Ties in
    /// distance are broken by the lower training index.
    pub fn predict(&self, x: &Matrix) -> Result<Vec<u8>> {
        if x.cols() != self.train_x.cols() {
            return Err(Error::shape("knn_predict", x.shape(), self.train_x.shape()));
        }
        let mut labels = Vec::with_capacity(x.rows());
        for q in 0..x.rows() {
            let query = x.row(q);
            let mut dist: Vec<(f64, usize)> = (0..self.train_x.rows())
                .map(|i| (squared_distance(query, self.train_x.row(i)), i))
                .collect();
            dist.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));
            let positive_votes = dist[..self.k]
                .iter()
                .filter(|&&(_, i)| self.train_y[i] == 1)
                .count();
            labels.push(u8::from(positive_votes * 2 > self.k));
        }
        Ok(labels)
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

/// Linear classifier minimizing lambda ||w||^2 + mean hinge loss.
#[derive(Debug, Clone)]
pub struct LinearSvm {
    weights: Vec<f64>,
    bias: f64,
    /// When the training data contained a single class, the model is a
    /// constant predictor for that class and this holds its label.
    degenerate: Option<u8>,
}

/// Objective value at the end of each epoch, computed on the full
/// training set.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmReport {
    pub epoch_objective: Vec<f64>,
}

impl LinearSvm {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate.is_some()
    }

    /// sign(w x + b) mapped back to {0, 1}; a sign of exactly zero reads
    /// as positive.
    pub fn predict(&self, x: &Matrix) -> Result<Vec<u8>> {
        if x.cols() != self.weights.len() {
            return Err(Error::shape("svm_predict", x.shape(), (1, self.weights.len())));
        }
        if let Some(label) = self.degenerate {
            return Ok(vec![label; x.rows()]);
        }
        Ok((0..x.rows())
            .map(|i| {
                let margin: f64 =
                    self.weights.iter().zip(x.row(i)).map(|(&w, &v)| w * v).sum::<f64>() + self.bias;
                u8::from(margin >= 0.0)
            })
            .collect())
    }

    /// lambda ||w||^2 + mean hinge loss over the given data.
    pub fn objective(&self, x: &Matrix, y: &[u8], l2_penalty: f64) -> f64 {
        let norm_sq: f64 = self.weights.iter().map(|w| w * w).sum();
        let hinge: f64 = (0..x.rows())
            .map(|i| {
                let s = signed_label(y[i]);
                let margin: f64 =
                    self.weights.iter().zip(x.row(i)).map(|(&w, &v)| w * v).sum::<f64>() + self.bias;
                (1.0 - s * margin).max(0.0)
            })
            .sum();
        l2_penalty * norm_sq + hinge / x.rows() as f64
    }
}

fn signed_label(label: u8) -> f64 {
    if label == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Epoch-shuffled mini-batch subgradient descent on the hinge objective.
/// Shuffling is seeded by `cfg.seed`; `cfg.momentum` is not used.
pub fn svm_train(x: &Matrix, y: &[u8], cfg: &TrainConfig) -> Result<(LinearSvm, SvmReport)> {
    cfg.validate()?;
    if x.rows() == 0 {
        return Err(Error::Param("SVM training set is empty".into()));
    }
    if y.len() != x.rows() {
        return Err(Error::Param(format!(
            "{} labels for {} samples",
            y.len(),
            x.rows()
        )));
    }

    if y.iter().all(|&l| l == y[0]) {
        return Ok((
            LinearSvm {
                weights: vec![0.0; x.cols()],
                bias: 0.0,
                degenerate: Some(y[0]),
            },
            SvmReport {
                epoch_objective: Vec::new(),
            },
        ));
    }

    let mut model = LinearSvm {
        weights: vec![0.0; x.cols()],
        bias: 0.0,
        degenerate: None,
    };
    let mut rng = Rng::new(cfg.seed);
    let mut order: Vec<usize> = (0..x.rows()).collect();
    let mut epoch_objective = Vec::with_capacity(cfg.epochs);

    for _ in 0..cfg.epochs {
        rng.shuffle(&mut order);
        for batch in order.chunks(cfg.batch_size) {
            let inv = 1.0 / batch.len() as f64;
            let mut grad_w = vec![0.0; x.cols()];
            let mut grad_b = 0.0;
            for &i in batch {
                let s = signed_label(y[i]);
                let row = x.row(i);
                let margin: f64 =
                    model.weights.iter().zip(row).map(|(&w, &v)| w * v).sum::<f64>() + model.bias;
                if s * margin < 1.0 {
                    for (g, &v) in grad_w.iter_mut().zip(row) {
                        *g -= s * v;
                    }
                    grad_b -= s;
                }
            }
            for (w, g) in model.weights.iter_mut().zip(&grad_w) {
                *w -= cfg.learning_rate * (2.0 * cfg.l2_penalty * *w + g * inv);
            }
            model.bias -= cfg.learning_rate * grad_b * inv;
        }
        epoch_objective.push(model.objective(x, y, cfg.l2_penalty));
    }
    Ok((model, SvmReport { epoch_objective }))
}

/// The proposed classifier's architecture trained from random
/// initialization with no pretraining.
pub fn mlp_baseline(
    x: &Matrix,
    y: &[u8],
    dims: &[usize],
    cfg: &TrainConfig,
    loss: LossKind,
    init_rng: &mut Rng,
) -> Result<(FeedForwardNet, FinetuneReport)> {
    let mut net = FeedForwardNet::random(dims, init_rng)?;
    let report = net.finetune(x, y, cfg, loss)?;
    Ok((net, report))
}
