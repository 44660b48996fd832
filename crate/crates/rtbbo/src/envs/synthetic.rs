//! Drifting random-Ising benchmark.
//!
//! Two banks of random Ising models A and B over a shared spin set define a
//! time-varying black box: each sub-reward is the negated energy of the
//! interpolated model `α(t)·A_m + (1-α(t))·B_m`, where `α` holds at 1 before
//! the change window, ramps linearly to 0 across it, and stays 0 after. The
//! expected total reward of a uniformly random spin vector is zero, and a
//! solver run on the true interpolated sum provides the normalization
//! reference for relative performance.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::{sb_solve, IsingModel, SbConfig, SpinVector};
use crate::seed::{derive, TAG_WHITEBOX};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticConfig {
    /// Shared spin count of every model.
    pub n_spins: usize,
    /// Models per bank (equals the number of sub-rewards).
    pub n_models: usize,
    /// Cycle at which the drift starts.
    pub t_change_start: u64,
    /// Cycle at which the drift completes.
    pub t_change_end: u64,
    /// Solver restarts for the white-box reference trace.
    pub whitebox_restarts: usize,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            n_spins: 60,
            n_models: 10,
            t_change_start: 2000,
            t_change_end: 4000,
            whitebox_restarts: 10,
        }
    }
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_spins < 2 {
            return Err(Error::InvalidConfig("synthetic.n_spins must be >= 2".into()));
        }
        if self.n_models == 0 {
            return Err(Error::InvalidConfig("synthetic.n_models must be >= 1".into()));
        }
        if self.t_change_end <= self.t_change_start {
            return Err(Error::InvalidConfig(
                "synthetic change window must have t_change_end > t_change_start".into(),
            ));
        }
        if self.whitebox_restarts == 0 {
            return Err(Error::InvalidConfig(
                "synthetic.whitebox_restarts must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// The generated benchmark instance. Stateless over time: rewards at cycle
/// `t` depend only on `t` and the queried spins.
#[derive(Clone, Debug)]
pub struct SyntheticDynamicEnv {
    cfg: SyntheticConfig,
    models_a: Vec<IsingModel>,
    models_b: Vec<IsingModel>,
}

fn random_coupling_model(n: usize, rng: &mut ChaCha8Rng) -> IsingModel {
    // Upper triangle i.i.d. standard normal, mirrored; zero fields.
    let mut m = IsingModel::zeros(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let g: f64 = StandardNormal.sample(rng);
            m.set_coupling(i, j, g).expect("indices in range");
        }
    }
    m
}

impl SyntheticDynamicEnv {
    /// Generate both model banks from a seed; the same seed reproduces the
    /// same black box bit for bit.
    pub fn generate(cfg: SyntheticConfig, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let models_a = (0..cfg.n_models)
            .map(|_| random_coupling_model(cfg.n_spins, &mut rng))
            .collect();
        let models_b = (0..cfg.n_models)
            .map(|_| random_coupling_model(cfg.n_spins, &mut rng))
            .collect();
        Ok(SyntheticDynamicEnv {
            cfg,
            models_a,
            models_b,
        })
    }

    pub fn config(&self) -> &SyntheticConfig {
        &self.cfg
    }

    pub fn n_spins(&self) -> usize {
        self.cfg.n_spins
    }

    pub fn n_rewards(&self) -> usize {
        self.cfg.n_models
    }

    /// Interpolation weight of bank A at cycle `t`.
    pub fn alpha(&self, t: u64) -> f64 {
        let (start, end) = (self.cfg.t_change_start, self.cfg.t_change_end);
        if t < start {
            1.0
        } else if t >= end {
            0.0
        } else {
            (end - t) as f64 / (end - start) as f64
        }
    }

    /// Sub-rewards for taking `s` at cycle `t`: the m-th entry is the
    /// negated energy of the interpolated m-th model pair.
    pub fn step(&self, s: &SpinVector, t: u64) -> Result<Vec<f64>> {
        if s.len() != self.cfg.n_spins {
            return Err(Error::dims(self.cfg.n_spins, s.len()));
        }
        let alpha = self.alpha(t);
        Ok(self
            .models_a
            .iter()
            .zip(&self.models_b)
            .map(|(a, b)| {
                let ea = a.energy_unchecked(s.as_slice());
                let eb = b.energy_unchecked(s.as_slice());
                -(alpha * ea + (1.0 - alpha) * eb)
            })
            .collect())
    }

    /// The true (white-box) summed model at cycle `t`.
    pub fn interpolated_total(&self, t: u64) -> IsingModel {
        let alpha = self.alpha(t);
        let mut total = IsingModel::zeros(self.cfg.n_spins);
        for (a, b) in self.models_a.iter().zip(&self.models_b) {
            total.add_scaled(a, alpha).expect("shared shape");
            total.add_scaled(b, 1.0 - alpha).expect("shared shape");
        }
        total
    }

    /// Total reward achieved by the solver on the white-box model at `t`.
    pub fn whitebox_reference(&self, t: u64, sb: &SbConfig) -> f64 {
        let model = self.interpolated_total(t);
        let cfg = SbConfig {
            restarts: self.cfg.whitebox_restarts,
            seed: derive(sb.seed, TAG_WHITEBOX ^ t),
            ..sb.clone()
        };
        let s = sb_solve(&model, &cfg);
        -model.energy_unchecked(s.as_slice())
    }

    /// White-box reference for every cycle in `0..cycles`.
    ///
    /// α is constant outside the change window, so only the transition
    /// cycles need separate solves; plateau values are computed once.
    pub fn whitebox_trace(&self, cycles: u64, sb: &SbConfig) -> Vec<f64> {
        let start = self.cfg.t_change_start.min(cycles);
        let end = self.cfg.t_change_end.min(cycles);
        let mut trace = vec![0.0; cycles as usize];
        if start > 0 {
            let v = self.whitebox_reference(0, sb);
            trace[..start as usize].fill(v);
        }
        if end < cycles {
            let v = self.whitebox_reference(self.cfg.t_change_end, sb);
            trace[end as usize..].fill(v);
        }
        if start < end {
            let mid: Vec<f64> = crate::par::map_indexed((end - start) as usize, |i| {
                self.whitebox_reference(start + i as u64, sb)
            });
            trace[start as usize..end as usize].copy_from_slice(&mid);
        }
        trace
    }
}
