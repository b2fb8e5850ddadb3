//! Stratified k-fold cross-validation and the comparison harness that
//! pits kNN, SVM, and a random-init MLP against the pretrained
//! classifier.
//!
//! Within each fold, min-max normalization is fitted on the fold's
//! training rows only and applied to train, test, and unlabeled rows
//! alike. The pretrained method additionally consumes the unlabeled pool
//! (plus the fold's training rows) during pretraining; held-out rows
//! never contribute labels to training. The MLP baseline and the
//! pretrained method run through the same fine-tune-and-score path and
//! differ only in how the network is initialized.

use crate::autoencoder::LossKind;
use crate::baselines::{svm_train, KnnModel};
use crate::config::TrainConfig;
use crate::data::{apply_normalize, fit_normalize, Dataset};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Rng};
use crate::net::FeedForwardNet;
use crate::sdae::{default_finetune_config, default_layer_specs, pretrain, LayerSpec};

// Purpose tags for deriving independent random streams from the root seed.
const TAG_FOLDS: u64 = 1;
const TAG_NEGATIVES: u64 = 2;
const TAG_INIT: u64 = 3;
const TAG_PRETRAIN: u64 = 4;
const TAG_FINETUNE: u64 = 5;

/// Confusion counts and the derived ratios. Precision and recall are
/// defined as 0 when their denominators are empty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub true_positives: usize,
    pub true_negatives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
}

impl Metrics {
    pub fn from_counts(tp: usize, tn: usize, fp: usize, fn_: usize) -> Result<Self> {
        let total = tp + tn + fp + fn_;
        if total == 0 {
            return Err(Error::Param("metrics of an empty prediction set".into()));
        }
        Ok(Metrics {
            true_positives: tp,
            true_negatives: tn,
            false_positives: fp,
            false_negatives: fn_,
            accuracy: (tp + tn) as f64 / total as f64,
            precision: if tp + fp == 0 {
                0.0
            } else {
                tp as f64 / (tp + fp) as f64
            },
            recall: if tp + fn_ == 0 {
                0.0
            } else {
                tp as f64 / (tp + fn_) as f64
            },
        })
    }
}

/// Counts the confusion matrix of a binary prediction against truth.
pub fn compute_metrics(pred: &[u8], truth: &[u8]) -> Result<Metrics> {
    if pred.len() != truth.len() {
        return Err(Error::Param(format!(
            "{} predictions for {} truths",
            pred.len(),
            truth.len()
        )));
    }
    let mut tp = 0;
    let mut tn = 0;
    let mut fp = 0;
    let mut fn_ = 0;
    for (&p, &t) in pred.iter().zip(truth) {
        match (p, t) {
            (1, 1) => tp += 1,
            (0, 0) => tn += 1,
            (1, 0) => fp += 1,
            _ => fn_ += 1,
        }
    }
    Metrics::from_counts(tp, tn, fp, fn_)
}

/// Stratified fold assignment: per class, indices are shuffled and dealt
/// round-robin, so per-fold class counts differ by at most one.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldPlan {
    pub k: usize,
    pub assignments: Vec<usize>,
    pub seed: u64,
}

impl FoldPlan {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] != fold)
            .collect()
    }
}

pub fn kfold_split(labels: &[u8], k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::Config(format!("k-fold requires k >= 2, got {k}")));
    }
    if labels.is_empty() {
        return Err(Error::Config("k-fold split of an empty label set".into()));
    }
    let mut rng = Rng::new(Rng::derive(seed, TAG_FOLDS));
    let mut assignments = vec![0usize; labels.len()];
    for class in [0u8, 1u8] {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.is_empty() {
            continue;
        }
        if members.len() < k {
            return Err(Error::Config(format!(
                "class {class} has {} members, fewer than k = {k}",
                members.len()
            )));
        }
        rng.shuffle(&mut members);
        for (position, &index) in members.iter().enumerate() {
            assignments[index] = position % k;
        }
    }
    Ok(FoldPlan {
        k,
        assignments,
        seed,
    })
}

/// The four compared classifiers, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    Knn,
    Svm,
    Mlp,
    Proposed,
}

pub const ALL_METHODS: [Method; 4] = [Method::Knn, Method::Svm, Method::Mlp, Method::Proposed];

impl Method {
    pub fn display_name(self) -> &'static str {
        match self {
            Method::Knn => "kNN",
            Method::Svm => "SVM",
            Method::Mlp => "MLP",
            Method::Proposed => "Proposed method",
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            Method::Knn => "knn",
            Method::Svm => "svm",
            Method::Mlp => "mlp",
            Method::Proposed => "proposed",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text.trim().to_ascii_lowercase().as_str() {
            "knn" => Ok(Method::Knn),
            "svm" => Ok(Method::Svm),
            "mlp" => Ok(Method::Mlp),
            "proposed" => Ok(Method::Proposed),
            other => Err(Error::Config(format!(
                "unknown method {other:?} (expected knn, svm, mlp, or proposed)"
            ))),
        }
    }

    fn tag(self) -> u64 {
        match self {
            Method::Knn => 101,
            Method::Svm => 102,
            Method::Mlp => 103,
            Method::Proposed => 104,
        }
    }
}

/// Full configuration of one comparison run.
#[derive(Debug, Clone)]
pub struct ComparisonConfig {
    pub k_folds: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
    pub layer_specs: Vec<LayerSpec>,
    pub finetune: TrainConfig,
    pub finetune_loss: LossKind,
    pub knn_k: usize,
    pub svm: TrainConfig,
    /// Negatives sampled per positive when the labeled set has none.
    pub negative_ratio: f64,
    /// Pool confusion counts across folds instead of averaging ratios.
    pub pooled_means: bool,
}

impl ComparisonConfig {
    pub fn default_profile(seed: u64) -> Self {
        ComparisonConfig {
            k_folds: 5,
            seed,
            methods: ALL_METHODS.to_vec(),
            layer_specs: default_layer_specs(seed),
            finetune: default_finetune_config(seed),
            finetune_loss: LossKind::CrossEntropy,
            knn_k: 5,
            svm: TrainConfig {
                learning_rate: 0.1,
                momentum: 0.0,
                l2_penalty: 0.01,
                epochs: 200,
                batch_size: 10,
                seed,
            },
            negative_ratio: 1.0,
            pooled_means: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldOutcome {
    pub method: Method,
    pub fold: usize,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub method: Method,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub k_folds: usize,
    pub seed: u64,
    pub notes: Vec<String>,
    pub fold_outcomes: Vec<FoldOutcome>,
    pub summaries: Vec<MethodSummary>,
}

impl ComparisonReport {
    pub fn summary_for(&self, method: Method) -> Option<&MethodSummary> {
        self.summaries.iter().find(|s| s.method == method)
    }

    /// Aligned table: one row per predictor, columns accuracy
    /// (percent), precision, recall.
    pub fn render_text(&self) -> String {
        let mut out = format!(
            "Classifier comparison: {}-fold cross-validation, seed {}\n",
            self.k_folds, self.seed
        );
        for note in &self.notes {
            out.push_str(note);
            out.push('\n');
        }
        out.push('\n');
        out.push_str(&format!(
            "{:<18}{:>9}{:>11}{:>8}\n",
            "Predictor", "Accuracy", "Precision", "Recall"
        ));
        for summary in &self.summaries {
            out.push_str(&format!(
                "{:<18}{:>8.1}%{:>11.2}{:>8.2}\n",
                summary.method.display_name(),
                summary.accuracy * 100.0,
                summary.precision,
                summary.recall
            ));
        }
        out
    }

    /// Machine-readable rows: method, fold, accuracy, precision, recall,
    /// with one mean row per method.
    pub fn render_delimited(&self) -> String {
        let mut out = String::from("method,fold,accuracy,precision,recall\n");
        for row in &self.fold_outcomes {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                row.method.key(),
                row.fold + 1,
                row.metrics.accuracy,
                row.metrics.precision,
                row.metrics.recall
            ));
        }
        for summary in &self.summaries {
            out.push_str(&format!(
                "{},mean,{},{},{}\n",
                summary.method.key(),
                summary.accuracy,
                summary.precision,
                summary.recall
            ));
        }
        out
    }
}

struct FoldData {
    train_x: Matrix,
    train_y: Vec<u8>,
    test_x: Matrix,
    test_y: Vec<u8>,
    unlabeled: Matrix,
}

/// Runs every requested method over the same stratified folds and
/// collects per-fold and mean metrics.
pub fn run_comparison(dataset: &Dataset, cfg: &ComparisonConfig) -> Result<ComparisonReport> {
    if cfg.methods.is_empty() {
        return Err(Error::Config("no methods requested".into()));
    }
    cfg.finetune.validate()?;
    cfg.svm.validate()?;
    let needs_net = cfg
        .methods
        .iter()
        .any(|m| matches!(m, Method::Mlp | Method::Proposed));
    if needs_net {
        if cfg.layer_specs.is_empty() {
            return Err(Error::Config(
                "network methods need at least one hidden layer spec".into(),
            ));
        }
        if cfg.layer_specs[0].input_dim != dataset.dim {
            return Err(Error::Config(format!(
                "layer specs expect {} inputs but the dataset has {} features",
                cfg.layer_specs[0].input_dim, dataset.dim
            )));
        }
    }

    let (dataset, notes) = prepare_labeled_classes(dataset, cfg)?;
    let plan = kfold_split(&dataset.labeled_y, cfg.k_folds, cfg.seed)?;

    // Normalization is refit inside every fold, on training rows only.
    let mut folds = Vec::with_capacity(cfg.k_folds);
    for fold in 0..cfg.k_folds {
        let train_idx = plan.train_indices(fold);
        let test_idx = plan.test_indices(fold);
        let train_raw = dataset.labeled_x.select_rows(&train_idx);
        let test_raw = dataset.labeled_x.select_rows(&test_idx);
        let stats = fit_normalize(&train_raw)?;
        folds.push(FoldData {
            train_x: apply_normalize(&stats, &train_raw)?,
            train_y: train_idx.iter().map(|&i| dataset.labeled_y[i]).collect(),
            test_x: apply_normalize(&stats, &test_raw)?,
            test_y: test_idx.iter().map(|&i| dataset.labeled_y[i]).collect(),
            unlabeled: if dataset.unlabeled_x.rows() > 0 {
                apply_normalize(&stats, &dataset.unlabeled_x)?
            } else {
                Matrix::zeros(0, dataset.dim)
            },
        });
    }

    let mut net_dims = vec![dataset.dim];
    net_dims.extend(cfg.layer_specs.iter().map(|s| s.hidden_dim));
    net_dims.push(1);

    let mut fold_outcomes = Vec::new();
    let mut summaries = Vec::new();
    for &method in ALL_METHODS.iter().filter(|m| cfg.methods.contains(m)) {
        let method_seed = Rng::derive(cfg.seed, method.tag());
        let mut fold_metrics = Vec::with_capacity(cfg.k_folds);
        for (fold, data) in folds.iter().enumerate() {
            let fold_seed = Rng::derive(method_seed, fold as u64);
            let metrics = run_fold(method, data, cfg, &net_dims, fold_seed)?;
            fold_metrics.push(metrics);
            fold_outcomes.push(FoldOutcome {
                method,
                fold,
                metrics,
            });
        }
        summaries.push(summarize(method, &fold_metrics, cfg.pooled_means)?);
    }

    Ok(ComparisonReport {
        k_folds: cfg.k_folds,
        seed: cfg.seed,
        notes,
        fold_outcomes,
        summaries,
    })
}

/// When the labeled set holds positives but no negatives, draw negatives
/// from the unlabeled pool at the configured ratio and move them into the
/// labeled set.
fn prepare_labeled_classes(
    dataset: &Dataset,
    cfg: &ComparisonConfig,
) -> Result<(Dataset, Vec<String>)> {
    if dataset.n_labeled() == 0 {
        return Err(Error::Config("dataset has no labeled rows".into()));
    }
    if dataset.negatives() > 0 || dataset.positives() == 0 {
        return Ok((dataset.clone(), Vec::new()));
    }

    let wanted = (dataset.positives() as f64 * cfg.negative_ratio).round() as usize;
    if wanted == 0 {
        return Err(Error::Config(format!(
            "negative ratio {} yields zero sampled negatives",
            cfg.negative_ratio
        )));
    }
    if wanted > dataset.n_unlabeled() {
        return Err(Error::Config(format!(
            "need {wanted} negatives but the unlabeled pool has only {} rows",
            dataset.n_unlabeled()
        )));
    }

    let mut rng = Rng::new(Rng::derive(cfg.seed, TAG_NEGATIVES));
    let mut indices: Vec<usize> = (0..dataset.n_unlabeled()).collect();
    rng.shuffle(&mut indices);
    let (sampled, remaining) = indices.split_at(wanted);
    let mut sampled = sampled.to_vec();
    let mut remaining = remaining.to_vec();
    sampled.sort_unstable();
    remaining.sort_unstable();

    let negatives = dataset.unlabeled_x.select_rows(&sampled);
    let labeled_x = dataset.labeled_x.vstack(&negatives)?;
    let mut labeled_y = dataset.labeled_y.clone();
    labeled_y.extend(std::iter::repeat_n(0u8, wanted));
    let unlabeled_x = dataset.unlabeled_x.select_rows(&remaining);

    let note = format!(
        "negatives: sampled {wanted} rows from the unlabeled pool at ratio {} (seed {})",
        cfg.negative_ratio, cfg.seed
    );
    let prepared = Dataset::new(
        dataset.dim,
        labeled_x,
        labeled_y,
        unlabeled_x,
        dataset.provenance.clone(),
    )?;
    Ok((prepared, vec![note]))
}

fn run_fold(
    method: Method,
    data: &FoldData,
    cfg: &ComparisonConfig,
    net_dims: &[usize],
    fold_seed: u64,
) -> Result<Metrics> {
    let pred = match method {
        Method::Knn => {
            let model = KnnModel::new(data.train_x.clone(), data.train_y.clone(), cfg.knn_k)?;
            model.predict(&data.test_x)?
        }
        Method::Svm => {
            let svm_cfg = cfg.svm.clone().with_seed(Rng::derive(fold_seed, TAG_FINETUNE));
            let (model, _) = svm_train(&data.train_x, &data.train_y, &svm_cfg)?;
            model.predict(&data.test_x)?
        }
        Method::Mlp => {
            let mut init_rng = Rng::new(Rng::derive(fold_seed, TAG_INIT));
            let net = FeedForwardNet::random(net_dims, &mut init_rng)?;
            return finetune_and_score(net, data, cfg, fold_seed);
        }
        Method::Proposed => {
            let pretrain_input = data.unlabeled.vstack(&data.train_x)?;
            let mut pretrain_rng = Rng::new(Rng::derive(fold_seed, TAG_PRETRAIN));
            let (stack, _) = pretrain(&cfg.layer_specs, &pretrain_input, &mut pretrain_rng)?;
            let mut init_rng = Rng::new(Rng::derive(fold_seed, TAG_INIT));
            let net = stack.unroll(&mut init_rng)?;
            return finetune_and_score(net, data, cfg, fold_seed);
        }
    };
    compute_metrics(&pred, &data.test_y)
}

/// Shared tail of the MLP baseline and the pretrained method: identical
/// fine-tuning and scoring, only the incoming initialization differs.
fn finetune_and_score(
    mut net: FeedForwardNet,
    data: &FoldData,
    cfg: &ComparisonConfig,
    fold_seed: u64,
) -> Result<Metrics> {
    let ft_cfg = cfg
        .finetune
        .clone()
        .with_seed(Rng::derive(fold_seed, TAG_FINETUNE));
    net.finetune(&data.train_x, &data.train_y, &ft_cfg, cfg.finetune_loss)?;
    let (pred, _) = net.predict(&data.test_x)?;
    compute_metrics(&pred, &data.test_y)
}

fn summarize(method: Method, folds: &[Metrics], pooled: bool) -> Result<MethodSummary> {
    if pooled {
        let tp = folds.iter().map(|m| m.true_positives).sum();
        let tn = folds.iter().map(|m| m.true_negatives).sum();
        let fp = folds.iter().map(|m| m.false_positives).sum();
        let fn_ = folds.iter().map(|m| m.false_negatives).sum();
        let pooled = Metrics::from_counts(tp, tn, fp, fn_)?;
        return Ok(MethodSummary {
            method,
            accuracy: pooled.accuracy,
            precision: pooled.precision,
            recall: pooled.recall,
        });
    }
    let n = folds.len() as f64;
    Ok(MethodSummary {
        method,
        accuracy: folds.iter().map(|m| m.accuracy).sum::<f64>() / n,
        precision: folds.iter().map(|m| m.precision).sum::<f64>() / n,
        recall: folds.iter().map(|m| m.recall).sum::<f64>() / n,
    })
}
