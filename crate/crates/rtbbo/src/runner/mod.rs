//! Experiment orchestration: configuration, trial execution, metrics, and
//! file outputs.

mod config;
mod emit;
mod metrics;

pub use config::{
    EnvKind, ExperimentConfig, Method, MethodFlags, Overrides, RewardScaling,
};
pub use emit::emit_outputs;
pub use metrics::{mean_std, moving_average, relative_performance, top_k_concentration};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::encoding::Action;
use crate::envs::wireless::WirelessSnapshot;
use crate::envs::{random_action, SyntheticDynamicEnv, WirelessEnv};
use crate::error::Result;
use crate::ising::SpinVector;
use crate::optimizer::{Codec, CycleStats, Optimizer, OptimizerConfig};
use crate::seed::{derive, derive2, TAG_ENV, TAG_RANDOM_ACTION, TAG_STRUCTURE, TAG_TRIAL};
use crate::surrogate::TrainConfig;

/// One sampling cycle of one trial. Rewards are raw environment values;
/// scaling only affects what the surrogates are trained on.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleRecord {
    pub t: u64,
    /// Wireless: chosen pattern per station. Synthetic: spin bits (0/1).
    pub action: Vec<u16>,
    pub rewards: Vec<f64>,
    pub total: f64,
    pub mean_counter: f64,
    pub c_exploration: f64,
    pub violated: bool,
}

/// All trials of one experiment plus the synthetic white-box trace.
#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub trials: Vec<Vec<CycleRecord>>,
    pub whitebox: Option<Vec<f64>>,
    pub snapshots: Option<Vec<WirelessSnapshot>>,
}

fn spins_to_repr(s: &SpinVector) -> Vec<u16> {
    s.iter().map(|v| if v > 0 { 1 } else { 0 }).collect()
}

fn action_to_repr(a: &Action) -> Vec<u16> {
    a.values.iter().map(|&v| v as u16).collect()
}

fn record(
    t: u64,
    action: Vec<u16>,
    rewards: Vec<f64>,
    stats: Option<CycleStats>,
) -> CycleRecord {
    let total = rewards.iter().sum();
    match stats {
        Some(s) => CycleRecord {
            t,
            action,
            rewards,
            total,
            mean_counter: s.mean_counter,
            c_exploration: s.c_exploration,
            violated: s.violated,
        },
        None => CycleRecord {
            t,
            action,
            rewards,
            total,
            mean_counter: 0.0,
            c_exploration: 0.0,
            violated: false,
        },
    }
}

fn optimizer_config(cfg: &ExperimentConfig, n_rewards_env: usize) -> OptimizerConfig {
    let flags = cfg.resolved_flags();
    let n_rewards = if flags.multi_reward { n_rewards_env } else { 1 };
    let train = TrainConfig {
        c_decay: if flags.weight_decay {
            cfg.train.c_decay
        } else {
            1.0
        },
        ..cfg.train.clone()
    };
    OptimizerConfig {
        n_rewards,
        reward_weights: cfg.reward_weights.clone(),
        window_capacity: if flags.sliding_window {
            Some(cfg.window_capacity)
        } else {
            None
        },
        incentive_enabled: flags.incentive,
        train,
        sb: cfg.sb.clone(),
        incentive: cfg.incentive.clone(),
        penalty: cfg.penalty.clone(),
    }
}

/// Scale raw env rewards into the training targets for this method.
fn scale_rewards(cfg: &ExperimentConfig, raw: &[f64]) -> Vec<f64> {
    let flags = cfg.resolved_flags();
    if flags.multi_reward {
        let scale = cfg.rewards.resolved_mr(cfg.env);
        raw.iter().map(|r| r * scale).collect()
    } else {
        let scale = cfg.rewards.resolved_sr(cfg.env);
        vec![raw.iter().sum::<f64>() * scale]
    }
}

/// Seed that fixes the black box itself (shared by every trial).
pub fn structure_seed(cfg: &ExperimentConfig) -> u64 {
    derive(cfg.seed, TAG_STRUCTURE)
}

/// Run one seeded trial and return its per-cycle records.
pub fn run_trial(cfg: &ExperimentConfig, trial: usize) -> Result<Vec<CycleRecord>> {
    run_trial_inner(cfg, trial, None)
}

fn run_trial_inner(
    cfg: &ExperimentConfig,
    trial: usize,
    mut snapshots: Option<&mut Vec<WirelessSnapshot>>,
) -> Result<Vec<CycleRecord>> {
    let trial_seed = derive2(cfg.seed, TAG_TRIAL, trial as u64);
    let structure_seed = derive(cfg.seed, TAG_STRUCTURE);
    let mut records = Vec::with_capacity(cfg.cycles as usize);

    match cfg.env {
        EnvKind::Synthetic => {
            let env = SyntheticDynamicEnv::generate(cfg.synthetic.clone(), structure_seed)?;
            match cfg.method {
                Method::Random => {
                    let mut rng =
                        ChaCha8Rng::seed_from_u64(derive(trial_seed, TAG_RANDOM_ACTION));
                    for t in 0..cfg.cycles {
                        let s = SpinVector::random(env.n_spins(), &mut rng);
                        let rewards = env.step(&s, t)?;
                        records.push(record(t, spins_to_repr(&s), rewards, None));
                    }
                }
                Method::Greedy => unreachable!("validated: greedy needs the wireless env"),
                _ => {
                    let opt_cfg = optimizer_config(cfg, env.n_rewards());
                    let mut opt = Optimizer::new(
                        Codec::Spins { n: env.n_spins() },
                        opt_cfg,
                        trial_seed,
                    )?;
                    for t in 0..cfg.cycles {
                        let s = opt.current_spins().clone();
                        let rewards = env.step(&s, t)?;
                        let scaled = scale_rewards(cfg, &rewards);
                        let stats = opt.observe(&scaled)?;
                        records.push(record(t, spins_to_repr(&s), rewards, Some(stats)));
                    }
                }
            }
        }
        EnvKind::Wireless => {
            let mut env = WirelessEnv::new(
                cfg.wireless.clone(),
                structure_seed,
                derive2(cfg.seed, TAG_ENV, trial as u64),
            )?;
            match cfg.method {
                Method::Random => {
                    let space = env.action_space();
                    let mut rng =
                        ChaCha8Rng::seed_from_u64(derive(trial_seed, TAG_RANDOM_ACTION));
                    for t in 0..cfg.cycles {
                        let a = random_action(&space, &mut rng);
                        if let Some(sink) = snapshots.as_deref_mut() {
                            sink.push(env.snapshot(&a));
                        }
                        let rewards = env.step(&a)?;
                        records.push(record(t, action_to_repr(&a), rewards, None));
                    }
                }
                Method::Greedy => {
                    for t in 0..cfg.cycles {
                        let a = env.greedy_action();
                        if let Some(sink) = snapshots.as_deref_mut() {
                            sink.push(env.snapshot(&a));
                        }
                        let rewards = env.step(&a)?;
                        records.push(record(t, action_to_repr(&a), rewards, None));
                    }
                }
                _ => {
                    let opt_cfg = optimizer_config(cfg, env.n_rewards());
                    let mut opt = Optimizer::new(
                        Codec::OneHot {
                            space: env.action_space(),
                        },
                        opt_cfg,
                        trial_seed,
                    )?;
                    for t in 0..cfg.cycles {
                        let a = opt
                            .current_action()
                            .expect("one-hot codec carries an action")
                            .clone();
                        if let Some(sink) = snapshots.as_deref_mut() {
                            sink.push(env.snapshot(&a));
                        }
                        let rewards = env.step(&a)?;
                        let scaled = scale_rewards(cfg, &rewards);
                        let stats = opt.observe(&scaled)?;
                        records.push(record(t, action_to_repr(&a), rewards, Some(stats)));
                    }
                }
            }
        }
    }
    Ok(records)
}

/// Run every trial (in parallel when built with the `parallel` feature) and
/// attach the white-box trace for synthetic experiments.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    run_experiment_with_whitebox(cfg, None)
}

/// [`run_experiment`] with an optional precomputed white-box trace, so
/// sweeps can share one trace across methods.
pub fn run_experiment_with_whitebox(
    cfg: &ExperimentConfig,
    whitebox: Option<Vec<f64>>,
) -> Result<ExperimentResult> {
    cfg.validate()?;
    let trials: Vec<Result<Vec<CycleRecord>>> =
        crate::par::map_indexed(cfg.trials, |i| run_trial(cfg, i));
    let trials = trials.into_iter().collect::<Result<Vec<_>>>()?;

    let whitebox = match (whitebox, cfg.env) {
        (Some(trace), _) => Some(trace),
        (None, EnvKind::Synthetic) => {
            let env = SyntheticDynamicEnv::generate(
                cfg.synthetic.clone(),
                derive(cfg.seed, TAG_STRUCTURE),
            )?;
            Some(env.whitebox_trace(cfg.cycles, &cfg.sb))
        }
        (None, EnvKind::Wireless) => None,
    };

    let snapshots = if cfg.snapshots && cfg.env == EnvKind::Wireless && cfg.trials > 0 {
        let mut sink = Vec::with_capacity(cfg.cycles as usize);
        run_trial_inner(cfg, 0, Some(&mut sink))?;
        Some(sink)
    } else {
        None
    };

    Ok(ExperimentResult {
        trials,
        whitebox,
        snapshots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_cfg(env: EnvKind, method: Method) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::quick_test(env, method);
        cfg.cycles = 20;
        cfg.trials = 2;
        cfg
    }

    #[test]
    fn full_loop_determinism() {
        for method in [Method::Random, Method::RtbboMr] {
            let cfg = tiny_cfg(EnvKind::Synthetic, method);
            let a = run_experiment(&cfg).unwrap();
            let b = run_experiment(&cfg).unwrap();
            assert_eq!(a.trials, b.trials);
            assert_eq!(a.whitebox, b.whitebox);
        }
        let cfg = tiny_cfg(EnvKind::Wireless, Method::RtbboSr);
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(a.trials, b.trials);
    }

    #[test]
    fn single_cycle_trial_takes_the_seeded_initial_action() {
        let mut cfg = tiny_cfg(EnvKind::Synthetic, Method::RtbboSr);
        cfg.cycles = 1;
        cfg.trials = 1;
        let result = run_experiment(&cfg).unwrap();
        assert_eq!(result.trials.len(), 1);
        assert_eq!(result.trials[0].len(), 1);

        // The recorded action equals the optimizer's seeded initial spins.
        let trial_seed = derive2(cfg.seed, TAG_TRIAL, 0);
        let opt = Optimizer::new(
            Codec::Spins {
                n: cfg.synthetic.n_spins,
            },
            optimizer_config(&cfg, cfg.synthetic.n_models),
            trial_seed,
        )
        .unwrap();
        assert_eq!(
            result.trials[0][0].action,
            spins_to_repr(opt.current_spins())
        );
    }

    #[test]
    fn ablation_flags_compose_orthogonally() {
        // Same resolved flag set means the same trace, regardless of which
        // method name it was reached from.
        // rtbbo_sr with multi-reward switched on is exactly rtbbo_mr.
        let mut a = tiny_cfg(EnvKind::Synthetic, Method::RtbboSr);
        a.overrides.multi_reward = Some(true);
        let b = tiny_cfg(EnvKind::Synthetic, Method::RtbboMr);
        assert_eq!(a.resolved_flags(), b.resolved_flags());
        let ra = run_experiment(&a).unwrap();
        let rb = run_experiment(&b).unwrap();
        assert_eq!(ra.trials, rb.trials);

        // rtbbo_mr with the incentive switched off is exactly fmsb_sw with
        // multi-reward switched on.
        let mut c = tiny_cfg(EnvKind::Synthetic, Method::RtbboMr);
        c.overrides.incentive = Some(false);
        let mut d = tiny_cfg(EnvKind::Synthetic, Method::FmsbSw);
        d.overrides.multi_reward = Some(true);
        assert_eq!(c.resolved_flags(), d.resolved_flags());
        let rc = run_experiment(&c).unwrap();
        let rd = run_experiment(&d).unwrap();
        assert_eq!(rc.trials, rd.trials);
    }

    #[test]
    fn random_method_total_reward_is_near_zero_on_the_synthetic_env() {
        let mut cfg = tiny_cfg(EnvKind::Synthetic, Method::Random);
        cfg.cycles = 1000;
        cfg.trials = 1;
        let result = run_experiment(&cfg).unwrap();
        let totals: Vec<f64> = result.trials[0].iter().map(|r| r.total).collect();
        let (mean, std) = mean_std(&totals);
        let sem = std / (totals.len() as f64).sqrt();
        assert!(
            mean.abs() < 3.0 * sem,
            "random-policy mean {mean} exceeds 3 standard errors ({sem})"
        );
    }

    #[test]
    fn greedy_is_rejected_on_the_synthetic_env() {
        let cfg = tiny_cfg(EnvKind::Synthetic, Method::Greedy);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn wireless_snapshots_are_collected_when_requested() {
        let mut cfg = tiny_cfg(EnvKind::Wireless, Method::Greedy);
        cfg.snapshots = true;
        cfg.cycles = 5;
        let result = run_experiment(&cfg).unwrap();
        let snaps = result.snapshots.unwrap();
        assert_eq!(snaps.len(), 5);
        assert_eq!(snaps[0].t, 0);
        assert_eq!(snaps[4].t, 4);
    }
}
