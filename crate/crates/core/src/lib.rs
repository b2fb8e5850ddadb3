//! Two-stage semi-supervised learning with stacked denoising autoencoders.
//!
//! The crate provides everything needed to pretrain an encoder stack on
//! unlabeled data, unroll it into a feed-forward classifier, fine-tune the
//! classifier on a small labeled set, and compare the result against kNN,
//! linear SVM, and randomly initialized MLP baselines under stratified
//! k-fold cross-validation.
//!
//! All numeric work runs on [`linalg::Matrix`] (dense, row-major, f64) and
//! every source of randomness flows through the seeded [`linalg::Rng`], so
//! identical seeds reproduce identical models, metrics, and report files.

pub mod autoencoder;
pub mod baselines;
pub mod config;
pub mod data;
pub mod error;
pub mod eval;
pub mod linalg;
pub mod model_io;
pub mod net;
pub mod sdae;

pub use error::{Error, ErrorClass, Result};
