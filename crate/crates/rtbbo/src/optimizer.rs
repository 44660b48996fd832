//! The per-cycle optimization loop.
//!
//! An [`Optimizer`] owns the dataset window, one surrogate per reward, the
//! incentive state, and the action it proposed for the current cycle. Each
//! [`Optimizer::observe`] call feeds back the rewards of that action and
//! produces the next one: push to the window, update the incentive, train
//! the surrogates, assemble the acquisition model, solve it, and decode
//! (with repair) into a valid action.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adaptation::{
    assemble_acquisition, integrate_multi, IncentiveConfig, IncentiveState, SlidingWindow,
};
use crate::encoding::{decode_with_repairs, encode, penalty_model, Action, ActionSpace};
use crate::envs::random_action;
use crate::error::{Error, Result};
use crate::ising::{sb_solve, SbConfig, SpinVector};
use crate::seed::{derive, derive2, TAG_INIT_ACTION, TAG_SB, TAG_TRAIN};
use crate::surrogate::{train_cycle, Surrogate, TrainConfig};

/// How the solver's spin output maps back to actions.
#[derive(Clone, Debug)]
pub enum Codec {
    /// Raw spins are the action; no constraints, no repair.
    Spins { n: usize },
    /// One-hot groups with penalty-enforced validity and repair on decode.
    OneHot { space: ActionSpace },
}

impl Codec {
    pub fn n_spins(&self) -> usize {
        match self {
            Codec::Spins { n } => *n,
            Codec::OneHot { space } => space.n_spins(),
        }
    }
}

/// Rule for the one-hot penalty coefficient.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct EncodingPenaltyConfig {
    /// "adaptive" scales with the surrogate's linear coefficients;
    /// "fixed" uses `fixed_value` as is.
    pub rule: PenaltyRule,
    /// Multiplier on the largest absolute linear coefficient (adaptive).
    pub adaptive_factor: f64,
    /// Lower bound keeping the coefficient positive early on (adaptive).
    pub floor: f64,
    /// Coefficient for the fixed rule.
    pub fixed_value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyRule {
    Adaptive,
    Fixed,
}

impl Default for EncodingPenaltyConfig {
    fn default() -> Self {
        EncodingPenaltyConfig {
            rule: PenaltyRule::Adaptive,
            adaptive_factor: 2.0,
            floor: 1e-6,
            fixed_value: 1.0,
        }
    }
}

impl EncodingPenaltyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.adaptive_factor > 0.0 && self.floor > 0.0 && self.fixed_value > 0.0) {
            return Err(Error::InvalidConfig(
                "encoding penalty parameters must be positive".into(),
            ));
        }
        Ok(())
    }

    fn coefficient(&self, linear_coeffs: &[f64]) -> f64 {
        match self.rule {
            PenaltyRule::Fixed => self.fixed_value,
            PenaltyRule::Adaptive => {
                let max_abs = linear_coeffs.iter().fold(0.0f64, |m, &h| m.max(h.abs()));
                (self.adaptive_factor * max_abs).max(self.floor)
            }
        }
    }
}

/// Everything the loop needs beyond the codec.
#[derive(Clone, Debug)]
pub struct OptimizerConfig {
    /// Sub-surrogates to train; equals the reward arity fed to `observe`.
    pub n_rewards: usize,
    /// Integration weights, one per sub-surrogate (default all 1).
    pub reward_weights: Option<Vec<f64>>,
    /// Dataset capacity; `None` keeps everything (cumulative baseline).
    pub window_capacity: Option<usize>,
    /// Whether the exploration incentive contributes to the acquisition.
    pub incentive_enabled: bool,
    pub train: TrainConfig,
    pub sb: SbConfig,
    pub incentive: IncentiveConfig,
    pub penalty: EncodingPenaltyConfig,
}

/// Per-cycle observability for records and controllers.
#[derive(Clone, Copy, Debug)]
pub struct CycleStats {
    pub mean_counter: f64,
    pub c_exploration: f64,
    pub violated: bool,
}

pub struct Optimizer {
    codec: Codec,
    cfg: OptimizerConfig,
    window: SlidingWindow,
    submodels: Vec<Surrogate>,
    incentive: IncentiveState,
    weights: Vec<f64>,
    current_spins: SpinVector,
    current_action: Option<Action>,
    cycle: u64,
    trial_seed: u64,
}

impl Optimizer {
    /// Build the loop state; the first action is uniformly random.
    pub fn new(codec: Codec, cfg: OptimizerConfig, trial_seed: u64) -> Result<Self> {
        cfg.train.validate()?;
        cfg.sb.validate()?;
        cfg.incentive.validate()?;
        cfg.penalty.validate()?;
        if cfg.n_rewards == 0 {
            return Err(Error::InvalidConfig("n_rewards must be >= 1".into()));
        }
        let weights = match &cfg.reward_weights {
            None => vec![1.0; cfg.n_rewards],
            Some(w) => {
                if w.len() != cfg.n_rewards {
                    return Err(Error::dims(cfg.n_rewards, w.len()));
                }
                w.clone()
            }
        };

        let n = codec.n_spins();
        let window = match cfg.window_capacity {
            Some(cap) => SlidingWindow::new(cap, cfg.n_rewards)?,
            None => SlidingWindow::unbounded(cfg.n_rewards)?,
        };
        let submodels = (0..cfg.n_rewards)
            .map(|_| Surrogate::new(n, cfg.train.k))
            .collect::<Result<Vec<_>>>()?;
        let incentive = IncentiveState::new(n, cfg.incentive.initial_c);

        let mut init_rng = ChaCha8Rng::seed_from_u64(derive(trial_seed, TAG_INIT_ACTION));
        let (current_spins, current_action) = match &codec {
            Codec::Spins { n } => (SpinVector::random(*n, &mut init_rng), None),
            Codec::OneHot { space } => {
                let action = random_action(space, &mut init_rng);
                let spins = encode(space, &action)?;
                (spins, Some(action))
            }
        };

        Ok(Optimizer {
            codec,
            cfg,
            window,
            submodels,
            incentive,
            weights,
            current_spins,
            current_action,
            cycle: 0,
            trial_seed,
        })
    }

    /// The spin encoding of the action to take this cycle.
    pub fn current_spins(&self) -> &SpinVector {
        &self.current_spins
    }

    /// The discrete action to take this cycle (one-hot codec only).
    pub fn current_action(&self) -> Option<&Action> {
        self.current_action.as_ref()
    }

    pub fn cycle(&self) -> u64 {
        self.cycle
    }

    pub fn window_len(&self) -> usize {
        self.window.len()
    }

    /// Feed back the (already scaled) rewards of the current action and
    /// compute the next one.
    pub fn observe(&mut self, scaled_rewards: &[f64]) -> Result<CycleStats> {
        if scaled_rewards.len() != self.cfg.n_rewards {
            return Err(Error::dims(self.cfg.n_rewards, scaled_rewards.len()));
        }
        self.window
            .push(self.current_spins.clone(), scaled_rewards.to_vec())?;

        // Counters always track the taken action; the coefficient controller
        // only runs when the incentive actually feeds the acquisition.
        self.incentive.update(&self.current_spins)?;
        if self.cfg.incentive_enabled {
            self.incentive.adjust(&self.cfg.incentive);
        }
        let stats_counter = self.incentive.mean_counter();
        let stats_c = self.incentive.c_exploration();

        let first_cycle = self.cycle == 0;
        let train_base = derive2(self.trial_seed, TAG_TRAIN, self.cycle);
        let window = &self.window;
        let train_cfg = &self.cfg.train;
        crate::par::for_each_mut(&mut self.submodels, |m, surrogate| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive(train_base, m as u64));
            train_cycle(surrogate, window, m, train_cfg, first_cycle, &mut rng)
                .expect("window is nonempty and the reward index is in range");
        });

        let params: Vec<_> = self.submodels.iter().map(|s| s.params.clone()).collect();
        let integrated = integrate_multi(&params, &self.weights)?;

        let n = self.codec.n_spins();
        let terms = if self.cfg.incentive_enabled {
            self.incentive.terms()
        } else {
            vec![0.0; n]
        };

        let penalty = match &self.codec {
            Codec::Spins { .. } => None,
            Codec::OneHot { space } => {
                let c = self.cfg.penalty.coefficient(integrated.field());
                Some(penalty_model(space, c)?)
            }
        };
        let acquisition = assemble_acquisition(&integrated, &terms, penalty.as_ref())?;

        let sb = SbConfig {
            seed: derive2(self.trial_seed, TAG_SB, self.cycle),
            ..self.cfg.sb.clone()
        };
        let raw = sb_solve(&acquisition, &sb);

        let violated = match &self.codec {
            Codec::Spins { .. } => {
                self.current_spins = raw;
                false
            }
            Codec::OneHot { space } => {
                let previous = self
                    .current_action
                    .as_ref()
                    .expect("one-hot codec always has an action");
                let (action, repairs) = decode_with_repairs(space, &raw, previous)?;
                self.current_spins = encode(space, &action)?;
                self.current_action = Some(action);
                repairs > 0
            }
        };

        self.cycle += 1;
        Ok(CycleStats {
            mean_counter: stats_counter,
            c_exploration: stats_c,
            violated,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_cfg(n_rewards: usize) -> OptimizerConfig {
        OptimizerConfig {
            n_rewards,
            reward_weights: None,
            window_capacity: Some(50),
            incentive_enabled: true,
            train: TrainConfig {
                k: 2,
                n_train: 10,
                batch_size: 5,
                ..TrainConfig::default()
            },
            sb: SbConfig {
                steps: 100,
                ..SbConfig::default()
            },
            incentive: IncentiveConfig::default(),
            penalty: EncodingPenaltyConfig::default(),
        }
    }

    #[test]
    fn spin_codec_runs_and_is_deterministic() {
        let run = || {
            let mut opt =
                Optimizer::new(Codec::Spins { n: 8 }, base_cfg(2), 77).unwrap();
            let mut seen = Vec::new();
            for t in 0..5 {
                let s = opt.current_spins().clone();
                let rewards = vec![s.get(0) as f64, t as f64 * 0.1];
                opt.observe(&rewards).unwrap();
                seen.push(s);
            }
            seen
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn one_hot_codec_always_produces_valid_actions() {
        let space = ActionSpace::new(vec![3, 4]).unwrap();
        let mut opt = Optimizer::new(
            Codec::OneHot { space: space.clone() },
            base_cfg(1),
            5,
        )
        .unwrap();
        for t in 0..10 {
            let action = opt.current_action().unwrap().clone();
            assert!(space.contains(&action));
            let spins = encode(&space, &action).unwrap();
            assert_eq!(&spins, opt.current_spins());
            opt.observe(&[(t as f64).sin()]).unwrap();
        }
    }

    #[test]
    fn reward_arity_is_checked() {
        let mut opt = Optimizer::new(Codec::Spins { n: 4 }, base_cfg(2), 1).unwrap();
        assert!(opt.observe(&[1.0]).is_err());
        assert!(opt.observe(&[1.0, 2.0, 3.0]).is_err());
        assert!(opt.observe(&[1.0, 2.0]).is_ok());
    }

    #[test]
    fn disabled_incentive_freezes_the_coefficient() {
        let mut cfg = base_cfg(1);
        cfg.incentive_enabled = false;
        let mut opt = Optimizer::new(Codec::Spins { n: 6 }, cfg, 9).unwrap();
        let c0 = opt.incentive.c_exploration();
        for _ in 0..20 {
            opt.observe(&[1.0]).unwrap();
        }
        assert_eq!(opt.incentive.c_exploration(), c0);
    }

    #[test]
    fn window_capacity_bounds_the_dataset() {
        let mut cfg = base_cfg(1);
        cfg.window_capacity = Some(5);
        let mut opt = Optimizer::new(Codec::Spins { n: 4 }, cfg, 2).unwrap();
        for t in 0..12 {
            opt.observe(&[t as f64]).unwrap();
        }
        assert_eq!(opt.window_len(), 5);

        let mut cfg = base_cfg(1);
        cfg.window_capacity = None;
        let mut opt = Optimizer::new(Codec::Spins { n: 4 }, cfg, 2).unwrap();
        for t in 0..12 {
            opt.observe(&[t as f64]).unwrap();
        }
        assert_eq!(opt.window_len(), 12);
    }
}
