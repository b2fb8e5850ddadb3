//! Dense matrices and the deterministic random number generator that all
//! training code draws from.

mod matrix;
mod rng;

pub(crate) use matrix::sigmoid_scalar;
pub use matrix::Matrix;
pub use rng::Rng;
