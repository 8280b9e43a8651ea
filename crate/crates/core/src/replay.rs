//! Fixed-capacity FIFO experience replay with uniform sampling.

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::StreamRng;

/// One experience `<s, a, r, s'>` plus the terminal flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub state: Vec<f64>,
    pub action: usize,
    /// Reward as used for training (after clipping, if enabled).
    pub reward: f64,
    pub next_state: Vec<f64>,
    /// `next_state` ended the episode through the dynamics. Time-limit
    /// truncation leaves this false.
    pub terminal: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReplayBuffer {
    capacity: usize,
    warmup: usize,
    storage: Vec<Transition>,
    /// Slot holding the oldest transition once the ring is full.
    head: usize,
    total_pushes: u64,
    rng: StreamRng,
}

impl ReplayBuffer {
    pub fn new(capacity: usize, warmup: usize, seed: u64) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::Config("replay capacity must be positive".into()));
        }
        if warmup == 0 {
            return Err(Error::Config("replay warmup threshold must be positive".into()));
        }
        Ok(ReplayBuffer {
            capacity,
            warmup,
            storage: Vec::with_capacity(capacity.min(1 << 16)),
            head: 0,
            total_pushes: 0,
            rng: StreamRng::seed_from_u64(seed),
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn warmup(&self) -> usize {
        self.warmup
    }

    pub fn len(&self) -> usize {
        self.storage.len()
    }

    pub fn is_empty(&self) -> bool {
        self.storage.is_empty()
    }

    pub fn total_pushes(&self) -> u64 {
        self.total_pushes
    }

    /// Stores `t`, evicting the oldest transition when full.
    pub fn push(&mut self, t: Transition) {
        if self.storage.len() < self.capacity {
            self.storage.push(t);
        } else {
            self.storage[self.head] = t;
            self.head = (self.head + 1) % self.capacity;
        }
        self.total_pushes += 1;
    }

    /// True once at least `warmup` transitions have ever been pushed.
    pub fn ready(&self) -> bool {
        self.total_pushes >= self.warmup as u64
    }

    /// Contents from oldest to newest.
    pub fn iter(&self) -> impl Iterator<Item = &Transition> + '_ {
        let (newer, older) = self.storage.split_at(self.head);
        older.iter().chain(newer.iter())
    }

    /// Storage slots of `batch` uniform draws with replacement.
    pub fn sample_indices(&mut self, batch: usize) -> Result<Vec<usize>> {
        if batch == 0 {
            return Err(Error::contract("sample batch must be positive"));
        }
        if self.storage.len() < batch {
            return Err(Error::InsufficientData {
                requested: batch,
                available: self.storage.len(),
            });
        }
        let n = self.storage.len();
        Ok((0..batch).map(|_| self.rng.gen_range(0..n)).collect())
    }

    pub fn sample(&mut self, batch: usize) -> Result<Vec<&Transition>> {
        let idx = self.sample_indices(batch)?;
        Ok(idx.into_iter().map(|i| &self.storage[i]).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(tag: f64) -> Transition {
        Transition {
            state: vec![tag],
            action: 0,
            reward: 0.0,
            next_state: vec![tag + 1.0],
            terminal: false,
        }
    }

    fn tags(buf: &ReplayBuffer) -> Vec<f64> {
        buf.iter().map(|t| t.state[0]).collect()
    }

    #[test]
    fn fifo_eviction() {
        let mut buf = ReplayBuffer::new(2, 1, 0).unwrap();
        for tag in [1.0, 2.0, 3.0] {
            buf.push(t(tag));
        }
        assert_eq!(tags(&buf), vec![2.0, 3.0]);
        buf.push(t(4.0));
        buf.push(t(5.0));
        assert_eq!(tags(&buf), vec![4.0, 5.0]);
    }

    #[test]
    fn single_element_sample() {
        let mut buf = ReplayBuffer::new(10, 1, 3).unwrap();
        buf.push(t(7.0));
        assert_eq!(buf.sample(1).unwrap()[0].state, vec![7.0]);
    }

    #[test]
    fn insufficient_data() {
        let mut buf = ReplayBuffer::new(10, 1, 3).unwrap();
        buf.push(t(0.0));
        assert!(matches!(
            buf.sample(2),
            Err(Error::InsufficientData {
                requested: 2,
                available: 1
            })
        ));
    }

    #[test]
    fn warmup_gate() {
        let mut buf = ReplayBuffer::new(5, 7, 0).unwrap();
        for i in 0..6 {
            buf.push(t(i as f64));
            assert!(!buf.ready());
        }
        buf.push(t(6.0));
        assert!(buf.ready());
        assert_eq!(buf.len(), 5);
    }

    #[test]
    fn rejects_zero_sizes() {
        assert!(ReplayBuffer::new(0, 1, 0).is_err());
        assert!(ReplayBuffer::new(1, 0, 0).is_err());
    }
}
