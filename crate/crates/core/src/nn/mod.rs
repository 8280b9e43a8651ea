//! Multilayer perceptrons with hand-written backpropagation, a
//! mean-squared-error objective and SGD / Adam / RMSprop updates.
//!
//! Every value function in the crate (the V network, its target copy, the
//! Q network) is an [`Mlp`].

pub mod gradcheck;
mod mlp;
mod optimizer;

pub use mlp::{Gradients, Mlp, MlpCheckpoint, CHECKPOINT_FORMAT, CHECKPOINT_VERSION};
pub use optimizer::{Optimizer, OptimizerConfig};
