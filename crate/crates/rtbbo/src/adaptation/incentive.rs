//! Exploration incentive.
//!
//! A counter per spin tracks how many consecutive observations kept the same
//! value. The incentive intensity is the squared counter signed by the last
//! value, which pressures long-unchanged spins to flip; its global
//! coefficient is adjusted multiplicatively to keep the mean counter inside
//! a target band.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::SpinVector;

/// Target band and adjustment for the incentive coefficient.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct IncentiveConfig {
    /// Lower bound of the mean-counter band.
    pub lo: f64,
    /// Upper bound of the mean-counter band.
    pub hi: f64,
    /// Multiplicative step applied when the mean leaves the band.
    pub adjust_factor: f64,
    /// Starting coefficient.
    pub initial_c: f64,
}

impl Default for IncentiveConfig {
    fn default() -> Self {
        IncentiveConfig {
            lo: 100.0,
            hi: 200.0,
            adjust_factor: 1.1,
            initial_c: 1e-6,
        }
    }
}

impl IncentiveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lo >= 0.0 && self.hi > self.lo) {
            return Err(Error::InvalidConfig(
                "incentive band must satisfy 0 <= lo < hi".into(),
            ));
        }
        if !(self.adjust_factor > 1.0) {
            return Err(Error::InvalidConfig(
                "incentive.adjust_factor must be > 1".into(),
            ));
        }
        if !(self.initial_c > 0.0) {
            return Err(Error::InvalidConfig(
                "incentive.initial_c must be > 0".into(),
            ));
        }
        Ok(())
    }
}

const C_MIN: f64 = 1e-12;
const C_MAX: f64 = 1e12;

/// Per-spin repeat counters, the last observed spins, and the coefficient.
#[derive(Clone, Debug)]
pub struct IncentiveState {
    counters: Vec<u64>,
    last: Option<SpinVector>,
    c_exploration: f64,
}

impl IncentiveState {
    pub fn new(n_spins: usize, initial_c: f64) -> Self {
        IncentiveState {
            counters: vec![0; n_spins],
            last: None,
            c_exploration: initial_c,
        }
    }

    pub fn c_exploration(&self) -> f64 {
        self.c_exploration
    }

    pub fn counters(&self) -> &[u64] {
        &self.counters
    }

    pub fn mean_counter(&self) -> f64 {
        if self.counters.is_empty() {
            return 0.0;
        }
        self.counters.iter().sum::<u64>() as f64 / self.counters.len() as f64
    }

    /// Observe the spins of the action taken this cycle.
    ///
    /// Each counter increments when the spin kept its previous value and
    /// resets to zero otherwise; the first observation only records the
    /// values.
    pub fn update(&mut self, observed: &SpinVector) -> Result<()> {
        if observed.len() != self.counters.len() {
            return Err(Error::dims(self.counters.len(), observed.len()));
        }
        match &mut self.last {
            None => self.last = Some(observed.clone()),
            Some(last) => {
                for (i, c) in self.counters.iter_mut().enumerate() {
                    if observed.get(i) == last.get(i) {
                        *c += 1;
                    } else {
                        *c = 0;
                    }
                }
                *last = observed.clone();
            }
        }
        Ok(())
    }

    /// Per-spin linear contribution to the maximization-frame acquisition:
    /// `term_i = -c * counters_i² * last_i`.
    pub fn terms(&self) -> Vec<f64> {
        match &self.last {
            None => vec![0.0; self.counters.len()],
            Some(last) => self
                .counters
                .iter()
                .enumerate()
                .map(|(i, &c)| {
                    let intensity = (c as f64) * (c as f64) * last.get(i) as f64;
                    -self.c_exploration * intensity
                })
                .collect(),
        }
    }

    /// One controller step: push the coefficient up when the mean counter
    /// exceeds the band, down when it falls below, clamped to sane bounds.
    pub fn adjust(&mut self, cfg: &IncentiveConfig) {
        let mean = self.mean_counter();
        if mean > cfg.hi {
            self.c_exploration *= cfg.adjust_factor;
        } else if mean < cfg.lo {
            self.c_exploration /= cfg.adjust_factor;
        }
        self.c_exploration = self.c_exploration.clamp(C_MIN, C_MAX);
    }
}
