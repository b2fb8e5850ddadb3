//! Hyperparameter bundle shared by every SGD training loop in the crate.

use crate::error::{Error, Result};

/// Settings for one SGD run with classical momentum.
///
/// The L2 penalty applies to weight matrices only, never to biases. The
/// seed drives any stream the consuming routine has to create itself
/// (for example the per-epoch shuffle during fine-tuning).
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub momentum: f64,
    pub l2_penalty: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        // A zero rate is legal and leaves parameters untouched.
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "learning rate must be nonnegative, got {}",
                self.learning_rate
            )));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::Config(format!(
                "momentum must lie in [0, 1), got {}",
                self.momentum
            )));
        }
        if !(self.l2_penalty >= 0.0 && self.l2_penalty.is_finite()) {
            return Err(Error::Config(format!(
                "l2 penalty must be nonnegative, got {}",
                self.l2_penalty
            )));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be at least 1".into()));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_epochs(mut self, epochs: usize) -> Self {
        self.epochs = epochs;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> TrainConfig {
        TrainConfig {
            learning_rate: 0.1,
            momentum: 0.1,
            l2_penalty: 0.0,
            epochs: 10,
            batch_size: 10,
            seed: 0,
        }
    }

    #[test]
    fn valid_config_passes() {
        assert!(base().validate().is_ok());
    }

    #[test]
    fn zero_epochs_is_rejected() {
        let mut cfg = base();
        cfg.epochs = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn momentum_of_one_is_rejected() {
        let mut cfg = base();
        cfg.momentum = 1.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn negative_learning_rate_is_rejected() {
        let mut cfg = base();
        cfg.learning_rate = -0.5;
        assert!(cfg.validate().is_err());
    }
}
