//! Dataset model, CSV ingestion, min-max normalization, and a synthetic
//! semi-supervised generator for desk-scale experiments.
//!
//! CSV layout: comma-delimited decimal floats with no header by default
//! (a flag skips one header line), the final column holding the label
//! when present. Label tokens are "1", "0", and "?" for unlabeled rows.
//! Lines starting with '#' are comments; a leading "# provenance: " line
//! round-trips the dataset's provenance note.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{sigmoid_scalar, Matrix, Rng};

const PROVENANCE_PREFIX: &str = "# provenance: ";

/// Labeled rows plus an unlabeled pool over a shared feature dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub dim: usize,
    pub labeled_x: Matrix,
    pub labeled_y: Vec<u8>,
    pub unlabeled_x: Matrix,
    pub provenance: String,
}

impl Dataset {
    pub fn new(
        dim: usize,
        labeled_x: Matrix,
        labeled_y: Vec<u8>,
        unlabeled_x: Matrix,
        provenance: String,
    ) -> Result<Self> {
        if labeled_x.rows() > 0 && labeled_x.cols() != dim {
            return Err(Error::Config(format!(
                "labeled rows have {} features, expected {dim}",
                labeled_x.cols()
            )));
        }
        if unlabeled_x.rows() > 0 && unlabeled_x.cols() != dim {
            return Err(Error::Config(format!(
                "unlabeled rows have {} features, expected {dim}",
                unlabeled_x.cols()
            )));
        }
        if labeled_y.len() != labeled_x.rows() {
            return Err(Error::Config(format!(
                "{} labels for {} labeled rows",
                labeled_y.len(),
                labeled_x.rows()
            )));
        }
        Ok(Dataset {
            dim,
            labeled_x,
            labeled_y,
            unlabeled_x,
            provenance,
        })
    }

    pub fn n_labeled(&self) -> usize {
        self.labeled_x.rows()
    }

    pub fn n_unlabeled(&self) -> usize {
        self.unlabeled_x.rows()
    }

    pub fn positives(&self) -> usize {
        self.labeled_y.iter().filter(|&&l| l == 1).count()
    }

    pub fn negatives(&self) -> usize {
        self.labeled_y.iter().filter(|&&l| l == 0).count()
    }
}

/// Parses a dataset file. Rows labeled "?" land in the unlabeled pool;
/// malformed rows are rejected with their line number.
pub fn load_csv(path: &Path, has_label_column: bool, skip_header: bool) -> Result<Dataset> {
    let text = fs::read_to_string(path).map_err(|e| Error::io_context(path, e))?;
    let path_str = path.display().to_string();
    let mut provenance = String::new();
    let mut labeled_rows: Vec<Vec<f64>> = Vec::new();
    let mut labeled_y: Vec<u8> = Vec::new();
    let mut unlabeled_rows: Vec<Vec<f64>> = Vec::new();
    let mut dim: Option<usize> = None;
    let mut header_pending = skip_header;

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(note) = trimmed.strip_prefix(PROVENANCE_PREFIX) {
            if provenance.is_empty() {
                provenance = note.to_string();
            }
            continue;
        }
        if trimmed.starts_with('#') {
            continue;
        }
        if header_pending {
            header_pending = false;
            continue;
        }

        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        let (feature_fields, label_field) = if has_label_column {
            if fields.len() < 2 {
                return Err(Error::Csv {
                    path: path_str,
                    line: lineno,
                    message: "expected at least one feature and a label".into(),
                });
            }
            (&fields[..fields.len() - 1], Some(fields[fields.len() - 1]))
        } else {
            (&fields[..], None)
        };

        match dim {
            None => dim = Some(feature_fields.len()),
            Some(d) if d != feature_fields.len() => {
                return Err(Error::Csv {
                    path: path_str,
                    line: lineno,
                    message: format!("row has {} features, expected {}", feature_fields.len(), d),
                });
            }
            Some(_) => {}
        }

        let mut row = Vec::with_capacity(feature_fields.len());
        for (col, field) in feature_fields.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| Error::Csv {
                path: path_str.clone(),
                line: lineno,
                message: format!("column {}: not a number: {:?}", col + 1, field),
            })?;
            if !value.is_finite() {
                return Err(Error::Csv {
                    path: path_str,
                    line: lineno,
                    message: format!("column {}: non-finite value", col + 1),
                });
            }
            row.push(value);
        }

        match label_field {
            None | Some("?") => unlabeled_rows.push(row),
            Some("1") => {
                labeled_rows.push(row);
                labeled_y.push(1);
            }
            Some("0") => {
                labeled_rows.push(row);
                labeled_y.push(0);
            }
            Some(other) => {
                return Err(Error::Csv {
                    path: path_str,
                    line: lineno,
                    message: format!("unknown label token {other:?} (expected 1, 0, or ?)"),
                });
            }
        }
    }

    let dim = dim.unwrap_or(0);
    Dataset::new(
        dim,
        Matrix::from_rows(&labeled_rows)?,
        labeled_y,
        if unlabeled_rows.is_empty() {
            Matrix::zeros(0, dim)
        } else {
            Matrix::from_rows(&unlabeled_rows)?
        },
        provenance,
    )
}

/// Writes the unified CSV: provenance comment first (when present), then
/// labeled rows, then unlabeled rows with "?" labels. Floats are printed
/// with full round-trip precision.
pub fn save_csv(dataset: &Dataset, path: &Path) -> Result<()> {
    let mut out = String::new();
    if !dataset.provenance.is_empty() {
        out.push_str(PROVENANCE_PREFIX);
        out.push_str(&dataset.provenance);
        out.push('\n');
    }
    for i in 0..dataset.labeled_x.rows() {
        push_row(&mut out, dataset.labeled_x.row(i));
        out.push(',');
        out.push_str(if dataset.labeled_y[i] == 1 { "1" } else { "0" });
        out.push('\n');
    }
    for i in 0..dataset.unlabeled_x.rows() {
        push_row(&mut out, dataset.unlabeled_x.row(i));
        out.push_str(",?\n");
    }
    fs::write(path, out).map_err(|e| Error::io_context(path, e))?;
    Ok(())
}

fn push_row(out: &mut String, row: &[f64]) {
    for (i, v) in row.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&v.to_string());
    }
}

/// Per-feature minimum and maximum of the rows the stats were fitted on.
#[derive(Debug, Clone, PartialEq)]
pub struct NormStats {
    min: Vec<f64>,
    max: Vec<f64>,
}

impl NormStats {
    pub fn dim(&self) -> usize {
        self.min.len()
    }
}

/// Fits min-max statistics on training rows only.
pub fn fit_normalize(train_x: &Matrix) -> Result<NormStats> {
    if train_x.rows() == 0 {
        return Err(Error::Param("cannot fit normalization on zero rows".into()));
    }
    let mut min = vec![f64::INFINITY; train_x.cols()];
    let mut max = vec![f64::NEG_INFINITY; train_x.cols()];
    for i in 0..train_x.rows() {
        for (j, &v) in train_x.row(i).iter().enumerate() {
            min[j] = min[j].min(v);
            max[j] = max[j].max(v);
        }
    }
    Ok(NormStats { min, max })
}

/// Maps each feature affinely into [0, 1] using the fitted range.
/// Out-of-range values clamp to the interval; constant features map
/// to 0.5.
pub fn apply_normalize(stats: &NormStats, x: &Matrix) -> Result<Matrix> {
    if x.cols() != stats.dim() {
        return Err(Error::shape("apply_normalize", x.shape(), (1, stats.dim())));
    }
    let mut out = x.clone();
    for i in 0..x.rows() {
        for j in 0..x.cols() {
            let range = stats.max[j] - stats.min[j];
            let v = if range == 0.0 {
                0.5
            } else {
                ((x.get(i, j) - stats.min[j]) / range).clamp(0.0, 1.0)
            };
            out.set(i, j, v);
        }
    }
    Ok(out)
}

/// Deterministic latent-factor generator. Latent coordinates are uniform
/// in (-1, 1); the observation is sigmoid(A u + eps) for a seeded mixing
/// matrix A and Gaussian eps; the label thresholds a fixed nonlinear
/// function of the latent coordinates. Labeled rows alternate target
/// classes through rejection, which pins the class balance near one half.
pub fn synth_generate(
    n_labeled: usize,
    n_unlabeled: usize,
    dim: usize,
    latent_dim: usize,
    noise: f64,
    seed: u64,
) -> Result<Dataset> {
    if dim == 0 || latent_dim == 0 {
        return Err(Error::Param("dimensions must be positive".into()));
    }
    if latent_dim >= dim {
        return Err(Error::Param(format!(
            "latent_dim must be smaller than dim, got {latent_dim} >= {dim}"
        )));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::Param(format!("noise must be nonnegative, got {noise}")));
    }

    let mut rng = Rng::new(seed);
    let mixing = rng.uniform_matrix(dim, latent_dim, -1.0, 1.0)?;

    let draw = |rng: &mut Rng| -> (Vec<f64>, u8) {
        let latent: Vec<f64> = (0..latent_dim).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let mut x = Vec::with_capacity(dim);
        for i in 0..dim {
            let mut activation: f64 = mixing
                .row(i)
                .iter()
                .zip(&latent)
                .map(|(&a, &u)| a * u)
                .sum();
            activation += rng.gaussian(noise);
            x.push(sigmoid_scalar(activation));
        }
        (x, latent_label(&latent))
    };

    let mut labeled_rows = Vec::with_capacity(n_labeled);
    let mut labeled_y = Vec::with_capacity(n_labeled);
    for i in 0..n_labeled {
        let target = (i % 2) as u8;
        let mut attempts = 0;
        loop {
            let (x, label) = draw(&mut rng);
            if label == target {
                labeled_rows.push(x);
                labeled_y.push(label);
                break;
            }
            attempts += 1;
            if attempts > 100_000 {
                return Err(Error::Numeric(
                    "label rejection sampling failed to converge".into(),
                ));
            }
        }
    }

    let mut unlabeled_rows = Vec::with_capacity(n_unlabeled);
    for _ in 0..n_unlabeled {
        unlabeled_rows.push(draw(&mut rng).0);
    }

    let provenance = format!(
        "synthetic latent-factor data: n_labeled={n_labeled} n_unlabeled={n_unlabeled} \
         dim={dim} latent_dim={latent_dim} noise={noise} seed={seed}"
    );
    Dataset::new(
        dim,
        if labeled_rows.is_empty() {
            Matrix::zeros(0, dim)
        } else {
            Matrix::from_rows(&labeled_rows)?
        },
        labeled_y,
        if unlabeled_rows.is_empty() {
            Matrix::zeros(0, dim)
        } else {
            Matrix::from_rows(&unlabeled_rows)?
        },
        provenance,
    )
}

/// Fixed nonlinear threshold on the latent coordinates.
fn latent_label(latent: &[f64]) -> u8 {
    let n = latent.len();
    let mut score = (std::f64::consts::PI * latent[0]).sin();
    for j in 0..n {
        score += latent[j] * latent[(j + 1) % n];
    }
    u8::from(score > 0.0)
}
