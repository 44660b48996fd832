//! Per-cycle surrogate training: pre-training weight decay followed by
//! mini-batch Adam iterations over the current dataset.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adam::AdamState;
use super::{fm_gradients_kernel, FmGradients, FmParams};
use crate::adaptation::SlidingWindow;
use crate::error::{Error, Result};

/// Training hyperparameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    /// Factor rank K.
    pub k: usize,
    /// Mini-batch size per gradient step.
    pub batch_size: usize,
    /// Gradient steps per sampling cycle.
    pub n_train: usize,
    /// Pre-training decay applied once per cycle to the factor matrix.
    pub c_decay: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    /// Learning rate for the factor matrix.
    pub lr_v: f64,
    /// Learning rate for the linear weights and bias.
    pub lr_w: f64,
    /// Half-width of the uniform factor initialization.
    pub init_range: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            k: 6,
            batch_size: 20,
            n_train: 200,
            c_decay: 0.999,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
            lr_v: 0.01,
            lr_w: 0.01,
            init_range: 0.001,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("train.k must be >= 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("train.batch_size must be >= 1".into()));
        }
        if !(self.c_decay > 0.0 && self.c_decay <= 1.0) {
            return Err(Error::InvalidConfig(
                "train.c_decay must be in (0, 1]".into(),
            ));
        }
        if !(self.lr_v > 0.0 && self.lr_w > 0.0) {
            return Err(Error::InvalidConfig("learning rates must be > 0".into()));
        }
        Ok(())
    }
}

/// A surrogate model bundled with its optimizer state.
#[derive(Clone, Debug)]
pub struct Surrogate {
    pub params: FmParams,
    adam_v: AdamState,
    adam_w: AdamState,
    adam_w0: AdamState,
}

impl Surrogate {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        let params = FmParams::zeros(n, k)?;
        Ok(Surrogate {
            adam_v: AdamState::new(n * k),
            adam_w: AdamState::new(n),
            adam_w0: AdamState::new(1),
            params,
        })
    }
}

/// One sampling cycle of surrogate training.
///
/// On the first cycle the factors are drawn uniformly from
/// `[-init_range, init_range]`, the linear weights and bias are zeroed, and
/// the Adam moments are reset; on later cycles all state carries over. The
/// factor matrix is then scaled once by `c_decay` and `n_train` mini-batches
/// of `batch_size` items, drawn from `window` uniformly with replacement,
/// are applied through Adam. Draws use `rewards[reward_index]` as the target.
pub fn train_cycle(
    surrogate: &mut Surrogate,
    window: &SlidingWindow,
    reward_index: usize,
    cfg: &TrainConfig,
    first_cycle: bool,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    if window.is_empty() {
        return Err(Error::invalid("cannot train on an empty window"));
    }
    if reward_index >= window.reward_arity() {
        return Err(Error::invalid(format!(
            "reward index {reward_index} out of range for arity {}",
            window.reward_arity()
        )));
    }

    let params = &mut surrogate.params;
    if first_cycle {
        for v in &mut params.v {
            *v = rng.random_range(-cfg.init_range..=cfg.init_range);
        }
        params.w.fill(0.0);
        params.w0 = 0.0;
        surrogate.adam_v.reset();
        surrogate.adam_w.reset();
        surrogate.adam_w0.reset();
    }

    // Pre-training weight decay: once per cycle, factors only.
    for v in &mut params.v {
        *v *= cfg.c_decay;
    }

    // Snapshot the window once per cycle as ±1 f64 rows so the gradient
    // kernel works on contiguous float data.
    let rows: Vec<Vec<f64>> = window
        .iter()
        .map(|s| s.spins.iter().map(f64::from).collect())
        .collect();
    let targets: Vec<f64> = window.iter().map(|s| s.rewards[reward_index]).collect();

    let n = params.n_features();
    let mut grads = FmGradients {
        v: vec![0.0; n * cfg.k],
        w: vec![0.0; n],
        w0: 0.0,
    };
    let mut z = vec![0.0; cfg.k];
    let mut batch_rows = Vec::with_capacity(cfg.batch_size);
    let mut batch_targets = Vec::with_capacity(cfg.batch_size);
    let mut w0_slice = [0.0f64];

    for _ in 0..cfg.n_train {
        batch_rows.clear();
        batch_targets.clear();
        for _ in 0..cfg.batch_size {
            let idx = rng.random_range(0..rows.len());
            batch_rows.push(rows[idx].as_slice());
            batch_targets.push(targets[idx]);
        }
        fm_gradients_kernel(params, &batch_rows, &batch_targets, &mut grads, &mut z);
        surrogate.adam_v.apply(
            &mut params.v,
            &grads.v,
            cfg.lr_v,
            cfg.adam_beta1,
            cfg.adam_beta2,
            cfg.adam_eps,
        );
        surrogate.adam_w.apply(
            &mut params.w,
            &grads.w,
            cfg.lr_w,
            cfg.adam_beta1,
            cfg.adam_beta2,
            cfg.adam_eps,
        );
        w0_slice[0] = params.w0;
        surrogate.adam_w0.apply(
            &mut w0_slice,
            &[grads.w0],
            cfg.lr_w,
            cfg.adam_beta1,
            cfg.adam_beta2,
            cfg.adam_eps,
        );
        params.w0 = w0_slice[0];
    }
    Ok(())
}
