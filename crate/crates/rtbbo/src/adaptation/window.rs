//! FIFO dataset of recent observations.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::ising::SpinVector;

/// One observation: the spin encoding of the action taken and its rewards
/// (a single entry for a total reward, one entry per sub-reward otherwise).
#[derive(Clone, Debug)]
pub struct Sample {
    pub spins: SpinVector,
    pub rewards: Vec<f64>,
}

/// Bounded FIFO of samples; pushing past capacity evicts the oldest item.
#[derive(Clone, Debug)]
pub struct SlidingWindow {
    items: VecDeque<Sample>,
    capacity: usize,
    arity: usize,
}

impl SlidingWindow {
    pub fn new(capacity: usize, reward_arity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::invalid("window capacity must be >= 1"));
        }
        if reward_arity == 0 {
            return Err(Error::invalid("reward arity must be >= 1"));
        }
        Ok(SlidingWindow {
            items: VecDeque::new(),
            capacity,
            arity: reward_arity,
        })
    }

    /// A window that never evicts; used for cumulative-dataset baselines.
    pub fn unbounded(reward_arity: usize) -> Result<Self> {
        Self::new(usize::MAX, reward_arity)
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn reward_arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Append a sample, evicting the oldest when full.
    pub fn push(&mut self, spins: SpinVector, rewards: Vec<f64>) -> Result<()> {
        if rewards.len() != self.arity {
            return Err(Error::dims(self.arity, rewards.len()));
        }
        if self.items.len() == self.capacity {
            self.items.pop_front();
        }
        self.items.push_back(Sample { spins, rewards });
        Ok(())
    }

    /// Indexed access, oldest first.
    pub fn get(&self, index: usize) -> &Sample {
        &self.items[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Sample> {
        self.items.iter()
    }
}
