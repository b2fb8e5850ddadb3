//! Implementations of the CLI subcommands.

use std::fs;
use std::path::{Path, PathBuf};

use sdae::autoencoder::{Corruption, LossKind};
use sdae::config::TrainConfig;
use sdae::data::{self, Dataset};
use sdae::error::{Error, Result};
use sdae::eval::{run_comparison, ComparisonConfig, Method};
use sdae::linalg::Rng;
use sdae::model_io;
use sdae::net::FeedForwardNet;
use sdae::sdae::{
    default_finetune_config, default_layer_specs, pretrain as pretrain_stack, LayerSpec,
    DEFAULT_PRETRAIN_EPOCHS,
};

use crate::pgm;
use crate::{EvaluateArgs, LossArg, NoiseKind, PretrainArgs, SynthArgs, TrainArgs, VisualizeArgs};

// Purpose tags splitting the root seed per sub-procedure.
const TAG_PRETRAIN: u64 = 11;
const TAG_INIT: u64 = 12;
const TAG_FINETUNE: u64 = 13;

pub fn synth(args: &SynthArgs) -> Result<()> {
    let dataset = data::synth_generate(
        args.n_labeled,
        args.n_unlabeled,
        args.dim,
        args.latent,
        args.noise,
        args.seed,
    )?;
    data::save_csv(&dataset, &args.out)?;
    println!(
        "wrote {} ({} labeled + {} unlabeled rows, dim {})",
        args.out.display(),
        dataset.n_labeled(),
        dataset.n_unlabeled(),
        dataset.dim
    );
    Ok(())
}

pub fn pretrain(args: &PretrainArgs) -> Result<()> {
    let dataset = load_dataset(
        &args.data.data,
        !args.no_label_column,
        args.data.skip_header,
        args.data.unlabeled.as_deref(),
    )?;
    let dims = parse_layers(&args.layers)?;
    if dims[0] != dataset.dim {
        return Err(Error::Config(format!(
            "layer widths start at {} but the data has {} features",
            dims[0], dataset.dim
        )));
    }
    let specs = build_layer_specs(
        &dims,
        &LevelOptions {
            noise_kind: args.noise_kind,
            noise_fraction: args.noise_fraction,
            sigma: args.sigma,
            lr: args.lr,
            momentum: args.momentum,
            loss: loss_kind(args.loss),
            epochs: args.epochs,
            batch_size: args.batch_size,
            seed: args.seed,
        },
    )?;

    // Pretraining consumes every feature row, labeled and unlabeled alike.
    let all_rows = dataset.labeled_x.vstack(&dataset.unlabeled_x)?;
    if all_rows.rows() == 0 {
        return Err(Error::Config("no feature rows to pretrain on".into()));
    }
    let stats = data::fit_normalize(&all_rows)?;
    let normalized = data::apply_normalize(&stats, &all_rows)?;

    let mut rng = Rng::new(Rng::derive(args.seed, TAG_PRETRAIN));
    let (stack, report) = pretrain_stack(&specs, &normalized, &mut rng)?;
    model_io::save_stack(&stack, &args.out)?;
    write_pretrain_trace(&args.out, &report)?;

    println!(
        "pretrained stack {} on {} rows; model -> {}, trace -> {}",
        stack.architecture(),
        normalized.rows(),
        args.out.display(),
        trace_path(&args.out).display()
    );
    Ok(())
}

fn write_pretrain_trace(out: &Path, report: &sdae::sdae::PretrainReport) -> Result<()> {
    let mut trace = String::from("layer,epoch,loss\n");
    for (layer, layer_trace) in report.layer_traces.iter().enumerate() {
        for (epoch, loss) in layer_trace.epoch_loss.iter().enumerate() {
            trace.push_str(&format!("{},{},{}\n", layer + 1, epoch + 1, loss));
        }
    }
    let path = trace_path(out);
    fs::write(&path, trace).map_err(|e| Error::io_context(&path, e))?;
    Ok(())
}

pub fn train(args: &TrainArgs) -> Result<()> {
    let dataset = load_dataset(&args.data.data, true, args.data.skip_header, args.data.unlabeled.as_deref())?;
    if dataset.n_labeled() == 0 {
        return Err(Error::Config("no labeled rows to fine-tune on".into()));
    }
    let stats = data::fit_normalize(&dataset.labeled_x)?;
    let train_x = data::apply_normalize(&stats, &dataset.labeled_x)?;

    let mut net = if args.no_pretrain {
        let dims = parse_layers(&args.layers)?;
        if dims[0] != dataset.dim {
            return Err(Error::Config(format!(
                "layer widths start at {} but the data has {} features",
                dims[0], dataset.dim
            )));
        }
        let mut net_dims = dims;
        net_dims.push(1);
        FeedForwardNet::random(&net_dims, &mut Rng::new(Rng::derive(args.seed, TAG_INIT)))?
    } else {
        let path = args.model.as_ref().expect("clap enforces --model");
        let stack = model_io::load_stack(path)?;
        let stack_dim = stack.layers()[0].input_dim();
        if stack_dim != dataset.dim {
            return Err(Error::Config(format!(
                "model expects {} features but the data has {}",
                stack_dim, dataset.dim
            )));
        }
        stack.unroll(&mut Rng::new(Rng::derive(args.seed, TAG_INIT)))?
    };

    let cfg = TrainConfig {
        learning_rate: args.lr,
        momentum: args.momentum,
        l2_penalty: args.l2,
        epochs: args.epochs,
        batch_size: args.batch_size,
        seed: Rng::derive(args.seed, TAG_FINETUNE),
    };
    let report = net.finetune(&train_x, &dataset.labeled_y, &cfg, loss_kind(args.loss))?;
    model_io::save_net(&net, &args.out)?;

    let trace_path = trace_path(&args.out);
    let mut trace = String::from("epoch,loss,accuracy\n");
    for (epoch, (loss, acc)) in report
        .epoch_loss
        .iter()
        .zip(&report.epoch_accuracy)
        .enumerate()
    {
        trace.push_str(&format!("{},{},{}\n", epoch + 1, loss, acc));
    }
    fs::write(&trace_path, trace).map_err(|e| Error::io_context(&trace_path, e))?;

    println!(
        "fine-tuned {} on {} labeled rows; final training accuracy {:.3}; model -> {}, trace -> {}",
        net.architecture(),
        train_x.rows(),
        report.epoch_accuracy.last().unwrap_or(&0.0),
        args.out.display(),
        trace_path.display()
    );
    Ok(())
}

pub fn evaluate(args: &EvaluateArgs) -> Result<()> {
    let dataset = load_dataset(&args.data.data, true, args.data.skip_header, args.data.unlabeled.as_deref())?;
    let dims = parse_layers(&args.layers)?;
    let specs = build_layer_specs(
        &dims,
        &LevelOptions {
            noise_kind: args.noise_kind,
            noise_fraction: args.noise_fraction,
            sigma: args.sigma,
            lr: None,
            momentum: None,
            loss: LossKind::SquaredError,
            epochs: args.pretrain_epochs,
            batch_size: args.batch_size,
            seed: args.seed,
        },
    )?;

    let mut methods = Vec::new();
    for token in args.methods.split(',') {
        let method = Method::parse(token)?;
        if !methods.contains(&method) {
            methods.push(method);
        }
    }

    let cfg = ComparisonConfig {
        k_folds: args.k_folds,
        seed: args.seed,
        methods,
        layer_specs: specs,
        finetune: TrainConfig {
            learning_rate: args.lr,
            momentum: args.momentum,
            l2_penalty: args.l2,
            epochs: args.epochs,
            batch_size: args.batch_size,
            seed: args.seed,
        },
        finetune_loss: loss_kind(args.loss),
        knn_k: args.knn_k,
        svm: {
            let mut svm = ComparisonConfig::default_profile(args.seed).svm;
            svm.batch_size = args.batch_size;
            svm
        },
        negative_ratio: args.neg_ratio,
        pooled_means: args.micro,
    };

    let report = run_comparison(&dataset, &cfg)?;
    let text = report.render_text();
    let mut txt_path = args.out.clone().into_os_string();
    txt_path.push(".txt");
    let mut csv_path = args.out.clone().into_os_string();
    csv_path.push(".csv");
    let txt_path = PathBuf::from(txt_path);
    let csv_path = PathBuf::from(csv_path);
    fs::write(&txt_path, &text).map_err(|e| Error::io_context(&txt_path, e))?;
    fs::write(&csv_path, report.render_delimited()).map_err(|e| Error::io_context(&csv_path, e))?;
    print!("{text}");
    println!(
        "reports -> {}, {}",
        txt_path.display(),
        csv_path.display()
    );
    Ok(())
}

pub fn visualize(args: &VisualizeArgs) -> Result<()> {
    let model = model_io::load_model(&args.model)?;
    let weights = model.weight_matrices();
    if args.layer == 0 || args.layer > weights.len() {
        return Err(Error::Config(format!(
            "layer {} out of range; the model has layers 1..={}",
            args.layer,
            weights.len()
        )));
    }
    let image = pgm::filter_image(weights[args.layer - 1]);
    fs::write(&args.out, image).map_err(|e| Error::io_context(&args.out, e))?;
    println!(
        "wrote {} ({}x{} filters of layer {})",
        args.out.display(),
        weights[args.layer - 1].cols(),
        weights[args.layer - 1].rows(),
        args.layer
    );
    Ok(())
}

pub fn show_config() -> Result<()> {
    let specs = default_layer_specs(0);
    let finetune = default_finetune_config(0);
    let eval = ComparisonConfig::default_profile(0);

    println!("Default configuration\n");
    println!("pretraining (stacked denoising autoencoder)");
    for (i, spec) in specs.iter().enumerate() {
        let fraction = match spec.corruption {
            Corruption::Masking { fraction } => fraction,
            _ => 0.0,
        };
        println!(
            "  level {}: hidden_neurons={} noise_fraction={} learning_rate={} momentum={}",
            i + 1,
            spec.hidden_dim,
            fraction,
            spec.train.learning_rate,
            spec.train.momentum
        );
    }
    println!(
        "  reconstruction_loss=squared-error epochs_per_layer={DEFAULT_PRETRAIN_EPOCHS} batch_size={}\n",
        specs[0].train.batch_size
    );

    println!("fine-tuning (unrolled feed-forward classifier)");
    println!(
        "  architecture={}-1",
        specs
            .iter()
            .map(|s| s.input_dim.to_string())
            .chain(std::iter::once(specs.last().unwrap().hidden_dim.to_string()))
            .collect::<Vec<_>>()
            .join("-")
    );
    println!("  activation=sigmoid");
    println!("  epochs={}", finetune.epochs);
    println!("  l2_weight_penalty={}", finetune.l2_penalty);
    println!("  learning_rate={}", finetune.learning_rate);
    println!("  momentum={}", finetune.momentum);
    println!("  loss=cross-entropy batch_size={}\n", finetune.batch_size);

    println!("evaluation");
    println!("  k_folds={}", eval.k_folds);
    println!("  knn_k={}", eval.knn_k);
    println!(
        "  svm: learning_rate={} l2_penalty={} epochs={} batch_size={}",
        eval.svm.learning_rate, eval.svm.l2_penalty, eval.svm.epochs, eval.svm.batch_size
    );
    println!("  negative_ratio={}\n", eval.negative_ratio);

    println!("synthetic data");
    println!("  n_labeled=100 n_unlabeled=5000 dim=18 latent_dim=4 noise=0.3");
    Ok(())
}

fn trace_path(model_path: &Path) -> PathBuf {
    let mut os = model_path.to_path_buf().into_os_string();
    os.push(".trace.csv");
    PathBuf::from(os)
}

fn loss_kind(arg: LossArg) -> LossKind {
    match arg {
        LossArg::SquaredError => LossKind::SquaredError,
        LossArg::CrossEntropy => LossKind::CrossEntropy,
    }
}

fn parse_layers(text: &str) -> Result<Vec<usize>> {
    let dims: Vec<usize> = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("bad layer width {t:?} in {text:?}")))
        })
        .collect::<Result<_>>()?;
    if dims.len() < 2 {
        return Err(Error::Config(
            "need at least an input width and one hidden width, e.g. 18,14".into(),
        ));
    }
    if dims.contains(&0) {
        return Err(Error::Config("layer widths must be positive".into()));
    }
    Ok(dims)
}

/// Flag-level pretraining options shared by `pretrain` and `evaluate`.
struct LevelOptions {
    noise_kind: NoiseKind,
    noise_fraction: Option<f64>,
    sigma: Option<f64>,
    lr: Option<f64>,
    momentum: Option<f64>,
    loss: LossKind,
    epochs: usize,
    batch_size: usize,
    seed: u64,
}

/// Per-level hyperparameters: the first level follows the level-1
/// defaults, deeper levels the level-2 defaults; explicit flags override
/// every level uniformly.
fn build_layer_specs(dims: &[usize], opts: &LevelOptions) -> Result<Vec<LayerSpec>> {
    let mut specs = Vec::with_capacity(dims.len() - 1);
    for (level, pair) in dims.windows(2).enumerate() {
        let default_fraction = if level == 0 { 0.4 } else { 0.1 };
        let default_lr = if level == 0 { 1.0 } else { 0.5 };
        let corruption = match opts.noise_kind {
            NoiseKind::Masking => {
                Corruption::masking(opts.noise_fraction.unwrap_or(default_fraction))?
            }
            NoiseKind::Gaussian => Corruption::gaussian(opts.sigma.unwrap_or(0.1))?,
        };
        specs.push(LayerSpec {
            input_dim: pair[0],
            hidden_dim: pair[1],
            corruption,
            loss: opts.loss,
            train: TrainConfig {
                learning_rate: opts.lr.unwrap_or(default_lr),
                momentum: opts.momentum.unwrap_or(0.1),
                l2_penalty: 0.0,
                epochs: opts.epochs,
                batch_size: opts.batch_size,
                seed: Rng::derive(opts.seed, level as u64),
            },
        });
    }
    Ok(specs)
}

fn load_dataset(
    path: &Path,
    has_label_column: bool,
    skip_header: bool,
    extra_unlabeled: Option<&Path>,
) -> Result<Dataset> {
    let mut dataset = data::load_csv(path, has_label_column, skip_header)?;
    if let Some(extra) = extra_unlabeled {
        let pool = data::load_csv(extra, false, skip_header)?;
        if pool.dim != dataset.dim && pool.n_unlabeled() > 0 && dataset.dim > 0 {
            return Err(Error::Config(format!(
                "unlabeled file has {} features but the dataset has {}",
                pool.dim, dataset.dim
            )));
        }
        dataset.unlabeled_x = dataset.unlabeled_x.vstack(&pool.unlabeled_x)?;
    }
    Ok(dataset)
}
