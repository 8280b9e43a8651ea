use rand::Rng;

use super::{Agent, AgentCheckpoint, Algorithm, TargetSchedule, TrainStats};
use crate::error::{Error, Result};
use crate::nn::{Mlp, Optimizer, OptimizerConfig};
use crate::replay::Transition;
use crate::tabular::argmax;

/// DQN or Double DQN: one Q network θ and an optional frozen copy θ⁻.
#[derive(Debug, Clone)]
pub struct DeepQAgent {
    double: bool,
    q_net: Mlp,
    q_opt: Optimizer,
    q_target: Option<Mlp>,
    schedule: TargetSchedule,
    gamma: f64,
    train_steps: u64,
}

/// DQN bootstrap value: `max_a' Q_target(s', a')`.
pub fn dqn_bootstrap(target_row: &[f64]) -> f64 {
    target_row.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

/// Double-DQN bootstrap value: the target network's estimate of the action
/// the online network prefers, `Q_target(s', argmax_a' Q_online(s', a'))`.
pub fn ddqn_bootstrap(online_row: &[f64], target_row: &[f64]) -> f64 {
    target_row[argmax(online_row)]
}

impl DeepQAgent {
    pub fn new<R: Rng + ?Sized>(
        double: bool,
        observation_dim: usize,
        action_count: usize,
        hidden: &[usize],
        optimizer: OptimizerConfig,
        gamma: f64,
        target_sync_period: Option<u64>,
        rng: &mut R,
    ) -> Result<Self> {
        let mut sizes = vec![observation_dim];
        sizes.extend_from_slice(hidden);
        sizes.push(action_count);
        let q_net = Mlp::new(&sizes, rng)?;
        Ok(Self::from_network(double, q_net, optimizer, gamma, target_sync_period))
    }

    pub fn from_network(
        double: bool,
        q_net: Mlp,
        optimizer: OptimizerConfig,
        gamma: f64,
        target_sync_period: Option<u64>,
    ) -> Self {
        DeepQAgent {
            double,
            q_opt: Optimizer::new(optimizer, &q_net),
            q_target: target_sync_period.map(|_| q_net.clone_parameters()),
            q_net,
            schedule: TargetSchedule::new(target_sync_period),
            gamma,
            train_steps: 0,
        }
    }

    pub fn is_double(&self) -> bool {
        self.double
    }

    pub fn q_net(&self) -> &Mlp {
        &self.q_net
    }

    pub fn q_net_mut(&mut self) -> &mut Mlp {
        &mut self.q_net
    }

    pub fn q_target(&self) -> &Mlp {
        self.q_target.as_ref().unwrap_or(&self.q_net)
    }

    pub fn q_target_mut(&mut self) -> Option<&mut Mlp> {
        self.q_target.as_mut()
    }

    pub fn compute_targets(&self, batch: &[&Transition]) -> Result<Vec<f64>> {
        let target_net = self.q_target();
        batch
            .iter()
            .map(|t| {
                if t.terminal {
                    return Ok(t.reward);
                }
                let target_row = target_net.forward(&t.next_state)?;
                let bootstrap = if self.double {
                    let online_row = self.q_net.forward(&t.next_state)?;
                    ddqn_bootstrap(&online_row, &target_row)
                } else {
                    dqn_bootstrap(&target_row)
                };
                Ok(t.reward + self.gamma * bootstrap)
            })
            .collect()
    }

    pub fn train_on_targets(&mut self, batch: &[&Transition], targets: &[f64]) -> Result<TrainStats> {
        if batch.is_empty() {
            return Err(Error::contract("empty training batch"));
        }
        if batch.len() != targets.len() {
            return Err(Error::contract("one target per transition required"));
        }
        let states: Vec<&[f64]> = batch.iter().map(|t| t.state.as_slice()).collect();
        let actions: Vec<usize> = batch.iter().map(|t| t.action).collect();
        let out = self.q_net.output_dim();
        let rows: Vec<Vec<f64>> = targets
            .iter()
            .zip(&actions)
            .map(|(&y, &a)| {
                let mut row = vec![0.0; out];
                row[a] = y;
                row
            })
            .collect();
        let (q_loss, grads) = self
            .q_net
            .mse_loss_and_gradients(&states, &rows, Some(&actions))?;
        self.q_opt.step(&mut self.q_net, &grads)?;
        self.train_steps += 1;
        if self.schedule.tick() {
            self.sync_target()?;
        }
        Ok(TrainStats {
            q_loss,
            v_loss: None,
        })
    }

    pub fn sync_target(&mut self) -> Result<()> {
        if let Some(target) = &mut self.q_target {
            target.copy_parameters_from(&self.q_net)?;
        }
        self.schedule.reset();
        Ok(())
    }

    pub(crate) fn restore(ckpt: AgentCheckpoint) -> Result<Self> {
        if !ckpt.q_optimizer.is_consistent_with(&ckpt.q_net) {
            return Err(Error::Checkpoint("optimizer state does not match its network".into()));
        }
        Ok(DeepQAgent {
            double: ckpt.algorithm == Algorithm::Ddqn,
            q_net: ckpt.q_net,
            q_opt: ckpt.q_optimizer,
            q_target: ckpt.target,
            schedule: ckpt.schedule,
            gamma: ckpt.gamma,
            train_steps: ckpt.train_steps,
        })
    }
}

impl Agent for DeepQAgent {
    fn algorithm(&self) -> Algorithm {
        if self.double {
            Algorithm::Ddqn
        } else {
            Algorithm::Dqn
        }
    }

    fn q_values(&self, observation: &[f64]) -> Result<Vec<f64>> {
        self.q_net.forward(observation)
    }

    fn train_on_batch(&mut self, batch: &[&Transition]) -> Result<TrainStats> {
        let targets = self.compute_targets(batch)?;
        self.train_on_targets(batch, &targets)
    }

    fn sync_target(&mut self) -> Result<()> {
        DeepQAgent::sync_target(self)
    }

    fn steps_since_sync(&self) -> u64 {
        self.schedule.since_sync()
    }

    fn train_steps(&self) -> u64 {
        self.train_steps
    }

    fn checkpoint(&self) -> AgentCheckpoint {
        AgentCheckpoint {
            algorithm: self.algorithm(),
            gamma: self.gamma,
            q_net: self.q_net.clone(),
            q_optimizer: self.q_opt.clone(),
            v_net: None,
            v_optimizer: None,
            target: self.q_target.clone(),
            schedule: self.schedule,
            train_steps: self.train_steps,
        }
    }
}
