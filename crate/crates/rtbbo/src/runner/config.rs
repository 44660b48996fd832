//! Experiment configuration and method definitions.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::adaptation::IncentiveConfig;
use crate::envs::{SyntheticConfig, WirelessConfig};
use crate::error::{Error, Result};
use crate::ising::SbConfig;
use crate::optimizer::EncodingPenaltyConfig;
use crate::surrogate::TrainConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvKind {
    Synthetic,
    Wireless,
}

impl fmt::Display for EnvKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnvKind::Synthetic => write!(f, "synthetic"),
            EnvKind::Wireless => write!(f, "wireless"),
        }
    }
}

impl FromStr for EnvKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "synthetic" => Ok(EnvKind::Synthetic),
            "wireless" => Ok(EnvKind::Wireless),
            other => Err(Error::InvalidConfig(format!("unknown env `{other}`"))),
        }
    }
}

/// The policy ladder: two reference policies plus the surrogate variants in
/// increasing order of adaptation machinery.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Uniform random actions.
    Random,
    /// Per-station own-power maximization (wireless only).
    Greedy,
    /// Surrogate trained on random draws from the cumulative dataset.
    FmsbBaseline,
    /// + sliding window.
    FmsbS,
    /// + pre-training weight decay.
    FmsbSw,
    /// + exploration incentive (single total reward).
    RtbboSr,
    /// + per-reward sub-surrogates.
    RtbboMr,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Random,
        Method::Greedy,
        Method::FmsbBaseline,
        Method::FmsbS,
        Method::FmsbSw,
        Method::RtbboSr,
        Method::RtbboMr,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Random => "random",
            Method::Greedy => "greedy",
            Method::FmsbBaseline => "fmsb_baseline",
            Method::FmsbS => "fmsb_s",
            Method::FmsbSw => "fmsb_sw",
            Method::RtbboSr => "rtbbo_sr",
            Method::RtbboMr => "rtbbo_mr",
        }
    }

    pub fn uses_surrogate(&self) -> bool {
        !matches!(self, Method::Random | Method::Greedy)
    }

    /// Feature set of each surrogate method; reference policies return the
    /// all-off flags.
    pub fn flags(&self) -> MethodFlags {
        match self {
            Method::Random | Method::Greedy => MethodFlags {
                sliding_window: false,
                weight_decay: false,
                incentive: false,
                multi_reward: false,
            },
            Method::FmsbBaseline => MethodFlags {
                sliding_window: false,
                weight_decay: false,
                incentive: false,
                multi_reward: false,
            },
            Method::FmsbS => MethodFlags {
                sliding_window: true,
                weight_decay: false,
                incentive: false,
                multi_reward: false,
            },
            Method::FmsbSw => MethodFlags {
                sliding_window: true,
                weight_decay: true,
                incentive: false,
                multi_reward: false,
            },
            Method::RtbboSr => MethodFlags {
                sliding_window: true,
                weight_decay: true,
                incentive: true,
                multi_reward: false,
            },
            Method::RtbboMr => MethodFlags {
                sliding_window: true,
                weight_decay: true,
                incentive: true,
                multi_reward: true,
            },
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown method `{s}`")))
    }
}

/// Resolved adaptation switches for one experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MethodFlags {
    /// Train on the bounded window instead of the cumulative dataset.
    pub sliding_window: bool,
    /// Apply the pre-training decay to the factors each cycle.
    pub weight_decay: bool,
    /// Add the exploration incentive to the acquisition.
    pub incentive: bool,
    /// One sub-surrogate per observable reward instead of one total model.
    pub multi_reward: bool,
}

/// Optional per-flag overrides on top of the method's defaults; lets
/// ablations toggle features independently of the method name.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Overrides {
    pub sliding_window: Option<bool>,
    pub weight_decay: Option<bool>,
    pub incentive: Option<bool>,
    pub multi_reward: Option<bool>,
}

/// Reward scaling applied before samples enter the training dataset.
/// `None` selects the per-environment default: wireless scales sub-rewards
/// by 1000 and the total by 100000/19; the synthetic benchmark is unscaled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RewardScaling {
    pub sr_scale: Option<f64>,
    pub mr_scale: Option<f64>,
}

impl RewardScaling {
    pub fn resolved_sr(&self, env: EnvKind) -> f64 {
        self.sr_scale.unwrap_or(match env {
            EnvKind::Synthetic => 1.0,
            EnvKind::Wireless => 100_000.0 / 19.0,
        })
    }

    pub fn resolved_mr(&self, env: EnvKind) -> f64 {
        self.mr_scale.unwrap_or(match env {
            EnvKind::Synthetic => 1.0,
            EnvKind::Wireless => 1000.0,
        })
    }
}

/// Full description of one experiment; serializable to/from TOML.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub env: EnvKind,
    pub method: Method,
    pub cycles: u64,
    pub trials: usize,
    pub seed: u64,
    /// Dump per-tick wireless snapshots of trial 0 (positions, channel
    /// magnitudes, chosen beams).
    pub snapshots: bool,
    /// Sliding-window capacity for window-based methods.
    pub window_capacity: usize,
    /// Integration weights for multi-reward sub-surrogates (default all 1).
    pub reward_weights: Option<Vec<f64>>,
    pub rewards: RewardScaling,
    pub sb: SbConfig,
    pub train: TrainConfig,
    pub incentive: IncentiveConfig,
    pub penalty: EncodingPenaltyConfig,
    pub synthetic: SyntheticConfig,
    pub wireless: WirelessConfig,
    pub overrides: Overrides,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            env: EnvKind::Synthetic,
            method: Method::RtbboMr,
            cycles: 6000,
            trials: 20,
            seed: 42,
            snapshots: false,
            window_capacity: 50,
            reward_weights: None,
            rewards: RewardScaling::default(),
            sb: SbConfig::default(),
            train: TrainConfig::default(),
            incentive: IncentiveConfig::default(),
            penalty: EncodingPenaltyConfig::default(),
            synthetic: SyntheticConfig::default(),
            wireless: WirelessConfig::default(),
            overrides: Overrides::default(),
        }
    }
}

impl ExperimentConfig {
    /// Method defaults with any explicit overrides applied.
    pub fn resolved_flags(&self) -> MethodFlags {
        let base = self.method.flags();
        MethodFlags {
            sliding_window: self.overrides.sliding_window.unwrap_or(base.sliding_window),
            weight_decay: self.overrides.weight_decay.unwrap_or(base.weight_decay),
            incentive: self.overrides.incentive.unwrap_or(base.incentive),
            multi_reward: self.overrides.multi_reward.unwrap_or(base.multi_reward),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.method == Method::Greedy && self.env != EnvKind::Wireless {
            return Err(Error::InvalidConfig(
                "the greedy method requires the wireless environment".into(),
            ));
        }
        if self.cycles == 0 {
            return Err(Error::InvalidConfig("cycles must be >= 1".into()));
        }
        if self.window_capacity == 0 {
            return Err(Error::InvalidConfig("window_capacity must be >= 1".into()));
        }
        if self.method.uses_surrogate() && self.train.n_train == 0 {
            return Err(Error::InvalidConfig(
                "train.n_train must be >= 1 for surrogate methods".into(),
            ));
        }
        self.sb.validate()?;
        self.train.validate()?;
        self.incentive.validate()?;
        self.penalty.validate()?;
        self.synthetic.validate()?;
        self.wireless.validate()?;
        if let Some(w) = &self.reward_weights {
            let expected = match self.env {
                EnvKind::Synthetic => self.synthetic.n_models,
                EnvKind::Wireless => self.wireless.n_cells,
            };
            if w.len() != expected {
                return Err(Error::InvalidConfig(format!(
                    "reward_weights has {} entries, need {expected}",
                    w.len()
                )));
            }
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text)
            .map_err(|e| Error::InvalidConfig(format!("config parse error: {e}")))?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// A deliberately small configuration for tests: tiny environments,
    /// short solver runs, light training.
    pub fn quick_test(env: EnvKind, method: Method) -> Self {
        ExperimentConfig {
            env,
            method,
            cycles: 30,
            trials: 2,
            seed: 7,
            synthetic: SyntheticConfig {
                n_spins: 8,
                n_models: 3,
                t_change_start: 10,
                t_change_end: 20,
                whitebox_restarts: 2,
            },
            wireless: WirelessConfig {
                n_cells: 2,
                period_ticks: 30,
                gather_tick: 10,
                ..WirelessConfig::default()
            },
            sb: SbConfig {
                steps: 60,
                ..SbConfig::default()
            },
            train: TrainConfig {
                k: 2,
                n_train: 8,
                batch_size: 4,
                ..TrainConfig::default()
            },
            ..ExperimentConfig::default()
        }
    }
}
