use serde::{Deserialize, Serialize};

use super::mlp::{Gradients, Mlp};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OptimizerConfig {
    Sgd {
        learning_rate: f64,
    },
    Adam {
        learning_rate: f64,
        beta1: f64,
        beta2: f64,
        epsilon: f64,
    },
    #[serde(rename = "rmsprop")]
    RmsProp {
        learning_rate: f64,
        decay: f64,
        epsilon: f64,
    },
}

impl OptimizerConfig {
    pub fn sgd(learning_rate: f64) -> Self {
        OptimizerConfig::Sgd { learning_rate }
    }

    pub fn adam(learning_rate: f64) -> Self {
        OptimizerConfig::Adam {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }

    pub fn rmsprop(learning_rate: f64) -> Self {
        OptimizerConfig::RmsProp {
            learning_rate,
            decay: 0.9,
            epsilon: 1e-8,
        }
    }

    pub fn learning_rate(&self) -> f64 {
        match *self {
            OptimizerConfig::Sgd { learning_rate }
            | OptimizerConfig::Adam { learning_rate, .. }
            | OptimizerConfig::RmsProp { learning_rate, .. } => learning_rate,
        }
    }

    pub fn with_learning_rate(mut self, lr: f64) -> Self {
        match &mut self {
            OptimizerConfig::Sgd { learning_rate }
            | OptimizerConfig::Adam { learning_rate, .. }
            | OptimizerConfig::RmsProp { learning_rate, .. } => *learning_rate = lr,
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let lr = self.learning_rate();
        if !(lr.is_finite() && lr > 0.0) {
            return Err(Error::Config(format!("learning rate must be positive, got {lr}")));
        }
        let ok = match *self {
            OptimizerConfig::Sgd { .. } => true,
            OptimizerConfig::Adam {
                beta1,
                beta2,
                epsilon,
                ..
            } => (0.0..1.0).contains(&beta1) && (0.0..1.0).contains(&beta2) && epsilon > 0.0,
            OptimizerConfig::RmsProp { decay, epsilon, .. } => {
                (0.0..1.0).contains(&decay) && epsilon > 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid optimizer hyperparameters {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Moments {
    None,
    Adam { first: Gradients, second: Gradients },
    #[serde(rename = "rmsprop")]
    RmsProp { mean_square: Gradients },
}

/// Zeroes subnormal values. Moments of parameters that stop receiving
/// gradient decay geometrically into the subnormal range, where arithmetic
/// on most CPUs is orders of magnitude slower.
#[inline]
fn flush(x: f64) -> f64 {
    if x.abs() < f64::MIN_POSITIVE {
        0.0
    } else {
        x
    }
}

/// Optimizer hyperparameters plus the per-parameter state they need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Optimizer {
    config: OptimizerConfig,
    steps: u64,
    moments: Moments,
}

impl Optimizer {
    pub fn new(config: OptimizerConfig, net: &Mlp) -> Self {
        let moments = match config {
            OptimizerConfig::Sgd { .. } => Moments::None,
            OptimizerConfig::Adam { .. } => Moments::Adam {
                first: Gradients::zeros_like(net),
                second: Gradients::zeros_like(net),
            },
            OptimizerConfig::RmsProp { .. } => Moments::RmsProp {
                mean_square: Gradients::zeros_like(net),
            },
        };
        Optimizer {
            config,
            steps: 0,
            moments,
        }
    }

    pub fn config(&self) -> &OptimizerConfig {
        &self.config
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// True when the moment accumulators exist exactly for the kinds that
    /// need them and are shaped like `net`.
    pub fn is_consistent_with(&self, net: &Mlp) -> bool {
        match (&self.config, &self.moments) {
            (OptimizerConfig::Sgd { .. }, Moments::None) => true,
            (OptimizerConfig::Adam { .. }, Moments::Adam { first, second }) => {
                first.matches(net) && second.matches(net)
            }
            (OptimizerConfig::RmsProp { .. }, Moments::RmsProp { mean_square }) => {
                mean_square.matches(net)
            }
            _ => false,
        }
    }

    pub fn step(&mut self, net: &mut Mlp, grads: &Gradients) -> Result<()> {
        if !grads.matches(net) {
            return Err(Error::contract("gradient shapes do not match the network"));
        }
        if !self.is_consistent_with(net) {
            return Err(Error::contract("optimizer state does not match the network"));
        }
        self.steps += 1;
        match (self.config, &mut self.moments) {
            (OptimizerConfig::Sgd { learning_rate }, Moments::None) => {
                for (p, g) in net.param_blocks_mut().zip(grads.blocks()) {
                    for (p, g) in p.iter_mut().zip(g) {
                        *p -= learning_rate * g;
                    }
                }
            }
            (
                OptimizerConfig::Adam {
                    learning_rate,
                    beta1,
                    beta2,
                    epsilon,
                },
                Moments::Adam { first, second },
            ) => {
                let t = self.steps as i32;
                let inv_correction1 = 1.0 / (1.0 - beta1.powi(t));
                let inv_correction2 = 1.0 / (1.0 - beta2.powi(t));
                let blocks = net
                    .param_blocks_mut()
                    .zip(grads.blocks())
                    .zip(first.blocks_mut())
                    .zip(second.blocks_mut());
                for (((p, g), m), v) in blocks {
                    for (((p, g), m), v) in p.iter_mut().zip(g).zip(m.iter_mut()).zip(v.iter_mut()) {
                        *m = flush(beta1 * *m + (1.0 - beta1) * g);
                        *v = flush(beta2 * *v + (1.0 - beta2) * g * g);
                        let m_hat = *m * inv_correction1;
                        let v_hat = *v * inv_correction2;
                        *p -= learning_rate * m_hat / (v_hat.sqrt() + epsilon);
                    }
                }
            }
            (
                OptimizerConfig::RmsProp {
                    learning_rate,
                    decay,
                    epsilon,
                },
                Moments::RmsProp { mean_square },
            ) => {
                let blocks = net
                    .param_blocks_mut()
                    .zip(grads.blocks())
                    .zip(mean_square.blocks_mut());
                for ((p, g), s) in blocks {
                    for ((p, g), s) in p.iter_mut().zip(g).zip(s.iter_mut()) {
                        *s = flush(decay * *s + (1.0 - decay) * g * g);
                        *p -= learning_rate * g / (s.sqrt() + epsilon);
                    }
                }
            }
            _ => unreachable!("consistency checked above"),
        }
        Ok(())
    }
}
