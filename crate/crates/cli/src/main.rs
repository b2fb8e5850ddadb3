//! Command-line driver for the stacked-denoising-autoencoder toolkit.
//!
//! Exit codes: 0 on success, 2 for configuration or usage errors, 3 for
//! I/O failures, 4 for numeric failures during training.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sdae::ErrorClass;

mod commands;
mod pgm;

#[derive(Parser)]
#[command(
    name = "sdae",
    version,
    about = "Semi-supervised classification with stacked denoising autoencoders",
    after_help = "Exit codes: 0 success, 2 configuration/usage error, 3 I/O error, 4 numeric failure."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic semi-supervised dataset as CSV
    Synth(SynthArgs),
    /// Pretrain the encoder stack layer by layer on feature rows
    Pretrain(PretrainArgs),
    /// Fine-tune the unrolled classifier on labeled rows
    Train(TrainArgs),
    /// Compare kNN, SVM, MLP, and the pretrained classifier with k-fold
    /// cross-validation
    Evaluate(EvaluateArgs),
    /// Render one layer's weight filters as a plain PGM image
    Visualize(VisualizeArgs),
    /// Print the default configuration profile
    ShowConfig,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseKind {
    Masking,
    Gaussian,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LossArg {
    SquaredError,
    CrossEntropy,
}

#[derive(Args)]
pub struct SynthArgs {
    /// Output CSV path
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub n_labeled: usize,
    #[arg(long, default_value_t = 5000)]
    pub n_unlabeled: usize,
    #[arg(long, default_value_t = 18)]
    pub dim: usize,
    /// Latent dimension of the generator
    #[arg(long, default_value_t = 4)]
    pub latent: usize,
    /// Observation noise standard deviation
    #[arg(long, default_value_t = 0.3)]
    pub noise: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Args)]
pub struct DataArgs {
    /// Dataset CSV (features plus a final 1/0/? label column)
    #[arg(long)]
    pub data: PathBuf,
    /// Extra feature-only CSV appended to the unlabeled pool
    #[arg(long)]
    pub unlabeled: Option<PathBuf>,
    /// Skip one header line in each input file
    #[arg(long)]
    pub skip_header: bool,
}

#[derive(Args)]
pub struct PretrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Treat every column of --data as a feature (no label column)
    #[arg(long)]
    pub no_label_column: bool,
    /// Output model path; the loss trace lands next to it as
    /// <out>.trace.csv
    #[arg(long)]
    pub out: PathBuf,
    /// Layer widths, input first, e.g. 18,14,8
    #[arg(long, default_value = "18,14,8")]
    pub layers: String,
    #[arg(long, value_enum, default_value_t = NoiseKind::Masking)]
    pub noise_kind: NoiseKind,
    /// Masking fraction for every level (defaults follow the per-level
    /// profile)
    #[arg(long)]
    pub noise_fraction: Option<f64>,
    /// Gaussian noise standard deviation (with --noise-kind gaussian)
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Learning rate for every level (defaults follow the per-level
    /// profile)
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub momentum: Option<f64>,
    #[arg(long, value_enum, default_value_t = LossArg::SquaredError)]
    pub loss: LossArg,
    /// Epochs per layer
    #[arg(long, default_value_t = 100)]
    pub epochs: usize,
    #[arg(long, default_value_t = 10)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Pretrained stack model to unroll
    #[arg(long, required_unless_present = "no_pretrain", conflicts_with = "no_pretrain")]
    pub model: Option<PathBuf>,
    /// Start from random initialization instead (the MLP baseline path)
    #[arg(long)]
    pub no_pretrain: bool,
    /// Output model path; the training trace lands next to it as
    /// <out>.trace.csv
    #[arg(long)]
    pub out: PathBuf,
    /// Hidden layer widths for --no-pretrain, input first
    #[arg(long, default_value = "18,14,8")]
    pub layers: String,
    #[arg(long, default_value_t = 1.0)]
    pub lr: f64,
    #[arg(long, default_value_t = 0.5)]
    pub momentum: f64,
    #[arg(long, default_value_t = 0.0007)]
    pub l2: f64,
    #[arg(long, default_value_t = 2000)]
    pub epochs: usize,
    #[arg(long, default_value_t = 10)]
    pub batch_size: usize,
    #[arg(long, value_enum, default_value_t = LossArg::CrossEntropy)]
    pub loss: LossArg,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Report base path; writes <out>.txt and <out>.csv
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub k_folds: usize,
    /// Comma-separated subset of knn,svm,mlp,proposed
    #[arg(long, default_value = "knn,svm,mlp,proposed")]
    pub methods: String,
    #[arg(long, default_value = "18,14,8")]
    pub layers: String,
    #[arg(long, value_enum, default_value_t = NoiseKind::Masking)]
    pub noise_kind: NoiseKind,
    #[arg(long)]
    pub noise_fraction: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Fine-tuning learning rate
    #[arg(long, default_value_t = 1.0)]
    pub lr: f64,
    #[arg(long, default_value_t = 0.5)]
    pub momentum: f64,
    #[arg(long, default_value_t = 0.0007)]
    pub l2: f64,
    /// Fine-tuning epochs
    #[arg(long, default_value_t = 2000)]
    pub epochs: usize,
    /// Pretraining epochs per layer
    #[arg(long, default_value_t = 100)]
    pub pretrain_epochs: usize,
    #[arg(long, default_value_t = 10)]
    pub batch_size: usize,
    #[arg(long, value_enum, default_value_t = LossArg::CrossEntropy)]
    pub loss: LossArg,
    #[arg(long, default_value_t = 5)]
    pub knn_k: usize,
    /// Negatives sampled per positive when the labeled set has none
    #[arg(long, default_value_t = 1.0)]
    pub neg_ratio: f64,
    /// Pool confusion counts across folds instead of averaging ratios
    #[arg(long)]
    pub micro: bool,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Args)]
pub struct VisualizeArgs {
    /// Stack or net model file
    #[arg(long)]
    pub model: PathBuf,
    /// 1-based layer index
    #[arg(long, default_value_t = 1)]
    pub layer: usize,
    /// Output PGM path
    #[arg(long)]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(args) => commands::synth(&args),
        Command::Pretrain(args) => commands::pretrain(&args),
        Command::Train(args) => commands::train(&args),
        Command::Evaluate(args) => commands::evaluate(&args),
        Command::Visualize(args) => commands::visualize(&args),
        Command::ShowConfig => commands::show_config(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(match err.class() {
                ErrorClass::Config => 2,
                ErrorClass::Io => 3,
                ErrorClass::Numeric => 4,
            })
        }
    }
}
