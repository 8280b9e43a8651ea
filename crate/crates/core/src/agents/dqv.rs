use rand::Rng;

use super::{Agent, AgentCheckpoint, Algorithm, TargetSchedule, TrainStats};
use crate::error::{Error, Result};
use crate::nn::{Mlp, Optimizer, OptimizerConfig};
use crate::replay::Transition;

/// Deep Quality-Value agent: a state-value network V (Φ), an optional
/// frozen copy Φ⁻, and a state-action network Q (θ), both regressed onto
/// the same bootstrap target `r + γ V(s', Φ⁻)`.
#[derive(Debug, Clone)]
pub struct DqvAgent {
    q_net: Mlp,
    q_opt: Optimizer,
    v_net: Mlp,
    v_opt: Optimizer,
    v_target: Option<Mlp>,
    schedule: TargetSchedule,
    gamma: f64,
    train_steps: u64,
}

impl DqvAgent {
    pub fn new<R: Rng + ?Sized>(
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
        *sizes.last_mut().unwrap() = 1;
        let v_net = Mlp::new(&sizes, rng)?;
        Self::from_networks(q_net, v_net, optimizer, gamma, target_sync_period)
    }

    pub fn from_networks(
        q_net: Mlp,
        v_net: Mlp,
        optimizer: OptimizerConfig,
        gamma: f64,
        target_sync_period: Option<u64>,
    ) -> Result<Self> {
        if v_net.output_dim() != 1 {
            return Err(Error::contract("the V network must have a single output"));
        }
        if v_net.input_dim() != q_net.input_dim() {
            return Err(Error::contract("V and Q networks must share the input size"));
        }
        Ok(DqvAgent {
            q_opt: Optimizer::new(optimizer, &q_net),
            v_opt: Optimizer::new(optimizer, &v_net),
            v_target: target_sync_period.map(|_| v_net.clone_parameters()),
            q_net,
            v_net,
            schedule: TargetSchedule::new(target_sync_period),
            gamma,
            train_steps: 0,
        })
    }

    pub fn q_net(&self) -> &Mlp {
        &self.q_net
    }

    pub fn v_net(&self) -> &Mlp {
        &self.v_net
    }

    pub fn v_net_mut(&mut self) -> &mut Mlp {
        &mut self.v_net
    }

    /// The network bootstrap targets are read from: Φ⁻ when a target
    /// network is configured, Φ otherwise.
    pub fn v_target(&self) -> &Mlp {
        self.v_target.as_ref().unwrap_or(&self.v_net)
    }

    /// `y = r` for terminal transitions, `r + γ V(s', Φ⁻)` otherwise.
    pub fn compute_targets(&self, batch: &[&Transition]) -> Result<Vec<f64>> {
        let target_net = self.v_target();
        batch
            .iter()
            .map(|t| {
                if t.terminal {
                    Ok(t.reward)
                } else {
                    Ok(t.reward + self.gamma * target_net.forward(&t.next_state)?[0])
                }
            })
            .collect()
    }

    /// Applies one θ step and one Φ step against an explicit target vector.
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
        let q_targets: Vec<Vec<f64>> = targets
            .iter()
            .zip(&actions)
            .map(|(&y, &a)| {
                let mut row = vec![0.0; out];
                row[a] = y;
                row
            })
            .collect();
        let (q_loss, q_grads) = self
            .q_net
            .mse_loss_and_gradients(&states, &q_targets, Some(&actions))?;
        self.q_opt.step(&mut self.q_net, &q_grads)?;

        let v_targets: Vec<[f64; 1]> = targets.iter().map(|&y| [y]).collect();
        let (v_loss, v_grads) = self.v_net.mse_loss_and_gradients(&states, &v_targets, None)?;
        self.v_opt.step(&mut self.v_net, &v_grads)?;

        self.train_steps += 1;
        if self.schedule.tick() {
            self.sync_target()?;
        }
        Ok(TrainStats {
            q_loss,
            v_loss: Some(v_loss),
        })
    }

    pub fn sync_target(&mut self) -> Result<()> {
        if let Some(target) = &mut self.v_target {
            target.copy_parameters_from(&self.v_net)?;
        }
        self.schedule.reset();
        Ok(())
    }

    pub(crate) fn restore(ckpt: AgentCheckpoint) -> Result<Self> {
        let v_net = ckpt
            .v_net
            .ok_or_else(|| Error::Checkpoint("DQV checkpoint lacks a V network".into()))?;
        let v_opt = ckpt
            .v_optimizer
            .ok_or_else(|| Error::Checkpoint("DQV checkpoint lacks a V optimizer".into()))?;
        if !ckpt.q_optimizer.is_consistent_with(&ckpt.q_net) || !v_opt.is_consistent_with(&v_net) {
            return Err(Error::Checkpoint("optimizer state does not match its network".into()));
        }
        Ok(DqvAgent {
            q_net: ckpt.q_net,
            q_opt: ckpt.q_optimizer,
            v_net,
            v_opt,
            v_target: ckpt.target,
            schedule: ckpt.schedule,
            gamma: ckpt.gamma,
            train_steps: ckpt.train_steps,
        })
    }
}

impl Agent for DqvAgent {
    fn algorithm(&self) -> Algorithm {
        Algorithm::Dqv
    }

    fn q_values(&self, observation: &[f64]) -> Result<Vec<f64>> {
        self.q_net.forward(observation)
    }

    fn train_on_batch(&mut self, batch: &[&Transition]) -> Result<TrainStats> {
        let targets = self.compute_targets(batch)?;
        self.train_on_targets(batch, &targets)
    }

    fn sync_target(&mut self) -> Result<()> {
        DqvAgent::sync_target(self)
    }

    fn steps_since_sync(&self) -> u64 {
        self.schedule.since_sync()
    }

    fn train_steps(&self) -> u64 {
        self.train_steps
    }

    fn checkpoint(&self) -> AgentCheckpoint {
        AgentCheckpoint {
            algorithm: Algorithm::Dqv,
            gamma: self.gamma,
            q_net: self.q_net.clone(),
            q_optimizer: self.q_opt.clone(),
            v_net: Some(self.v_net.clone()),
            v_optimizer: Some(self.v_opt.clone()),
            target: self.v_target.clone(),
            schedule: self.schedule,
            train_steps: self.train_steps,
        }
    }
}
