//! Factorization-machine surrogate model.
//!
//! The surrogate predicts a reward from a spin vector as
//!
//! ```text
//! r̂(s) = Σ_{i<j} <v_i, v_j> s_i s_j + Σ_i w_i s_i + w0
//! ```
//!
//! with K-dimensional factor vectors `v_i`, so the full pairwise coefficient
//! matrix is the low-rank product `V Vᵀ`. Prediction and gradients use the
//! K-space identity (cost O(N·K) instead of O(N²)); [`FmParams::to_ising`]
//! rewrites the same function as an Ising model so a solver can optimize
//! over actions.

mod adam;
mod train;

pub use adam::AdamState;
pub use train::{train_cycle, Surrogate, TrainConfig};

use crate::error::{Error, Result};
use crate::ising::{IsingModel, SpinVector};

/// Factorization-machine parameters.
///
/// The factor matrix is stored factor-major: `v[k * N + i]` is component `k`
/// of feature `i`'s factor vector, so each factor component is a contiguous
/// N-slice and the training kernels reduce to plain dot products and axpys.
#[derive(Clone, Debug, PartialEq)]
pub struct FmParams {
    n: usize,
    k: usize,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    pub w0: f64,
}

impl FmParams {
    pub fn zeros(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::invalid(format!(
                "factor rank must satisfy 1 <= K <= N, got K={k}, N={n}"
            )));
        }
        Ok(FmParams {
            n,
            k,
            v: vec![0.0; n * k],
            w: vec![0.0; n],
            w0: 0.0,
        })
    }

    pub fn n_features(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.k
    }

    /// Component `k` of feature `i`'s factor vector.
    pub fn factor(&self, i: usize, k: usize) -> f64 {
        self.v[k * self.n + i]
    }

    /// Contiguous slice of component `k` across all features.
    pub fn factor_component(&self, k: usize) -> &[f64] {
        &self.v[k * self.n..(k + 1) * self.n]
    }

    /// Predict the reward for a spin configuration.
    ///
    /// Uses `Σ_{i<j} <v_i,v_j> s_i s_j = 1/2 Σ_k (z_k² - Σ_i v_ik²)` with
    /// `z_k = Σ_i v_ik s_i`, which holds because `s_i² = 1`.
    pub fn predict(&self, s: &SpinVector) -> Result<f64> {
        if s.len() != self.n {
            return Err(Error::dims(self.n, s.len()));
        }
        let spins: Vec<f64> = s.iter().map(f64::from).collect();
        let mut z = vec![0.0; self.k];
        Ok(self.predict_kernel(&spins, &mut z, self.factor_sum_sq()))
    }

    /// Sum of squares of every factor entry; datum-independent, so batch
    /// loops compute it once.
    pub(crate) fn factor_sum_sq(&self) -> f64 {
        crate::kernels::sum_sq(&self.v)
    }

    /// Prediction on a pre-converted ±1 spin row; `z` is a K-length scratch
    /// that holds `z_k = Σ_i v_ik s_i` on return, and `v_sum_sq` must be
    /// [`FmParams::factor_sum_sq`] of the current factors.
    pub(crate) fn predict_kernel(&self, spins: &[f64], z: &mut [f64], v_sum_sq: f64) -> f64 {
        let n = self.n;
        let mut quad = -v_sum_sq;
        for (kk, zk) in z.iter_mut().enumerate() {
            let col = &self.v[kk * n..(kk + 1) * n];
            let d = crate::kernels::dot(col, spins);
            *zk = d;
            quad += d * d;
        }
        0.5 * quad + self.w0 + crate::kernels::dot(&self.w, spins)
    }

    /// Rewrite the surrogate as an Ising model.
    ///
    /// With `maximize` set, the model's energy equals `-predict(s)` for every
    /// spin vector, so minimizing it maximizes the surrogate. With `maximize`
    /// unset the energy equals `+predict(s)`.
    pub fn to_ising(&self, maximize: bool) -> IsingModel {
        let n = self.n;
        let sign = if maximize { 1.0 } else { -1.0 };
        // E(s) = -Σ_{i<j} J_ij s_i s_j + Σ h_i s_i + offset, so J = sign·VVᵀ
        // (zero diagonal), h = -sign·w, offset = -sign·w0 gives E = -sign·r̂.
        let mut j = vec![0.0; n * n];
        for kk in 0..self.k {
            let col = &self.v[kk * n..(kk + 1) * n];
            for a in 0..n {
                let va = sign * col[a];
                let row = &mut j[a * n..(a + 1) * n];
                for (entry, &vb) in row.iter_mut().zip(col) {
                    *entry += va * vb;
                }
            }
        }
        for a in 0..n {
            j[a * n + a] = 0.0;
        }
        let h = self.w.iter().map(|&wi| -sign * wi).collect();
        IsingModel::from_parts(n, j, h, -sign * self.w0).expect("shapes are consistent")
    }
}

/// Robust regression loss `log(cosh(pred - target))`.
///
/// Evaluated as `|d| + ln(1 + e^{-2|d|}) - ln 2`, which never overflows.
pub fn logcosh_loss(pred: f64, target: f64) -> f64 {
    let d = (pred - target).abs();
    d + (-2.0 * d).exp().ln_1p() - std::f64::consts::LN_2
}

/// Batch-mean gradients of the log-cosh loss; `v` uses the same
/// factor-major layout as [`FmParams::v`].
#[derive(Clone, Debug)]
pub struct FmGradients {
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    pub w0: f64,
}

impl FmGradients {
    fn zeros(n: usize, k: usize) -> Self {
        FmGradients {
            v: vec![0.0; n * k],
            w: vec![0.0; n],
            w0: 0.0,
        }
    }
}

/// Gradients of the mean log-cosh loss over `batch`.
///
/// Per datum the error signal is `e = tanh(r̂ - r)`; then
/// `∂L/∂w_i = e·s_i`, `∂L/∂w0 = e` (the bias sees s = +1), and
/// `∂L/∂v_ik = e·(z_k·s_i - v_ik)` with the shared precompute
/// `z_k = Σ_j v_jk s_j`, so a batch costs O(batch·N·K).
pub fn fm_gradients(params: &FmParams, batch: &[(&SpinVector, f64)]) -> Result<FmGradients> {
    if batch.is_empty() {
        return Err(Error::invalid("gradient batch must be nonempty"));
    }
    let n = params.n;
    let mut rows = Vec::with_capacity(batch.len());
    let mut targets = Vec::with_capacity(batch.len());
    for &(s, target) in batch {
        if s.len() != n {
            return Err(Error::dims(n, s.len()));
        }
        rows.push(s.iter().map(f64::from).collect::<Vec<f64>>());
        targets.push(target);
    }
    let row_refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
    let mut out = FmGradients::zeros(n, params.k);
    let mut z = vec![0.0; params.k];
    fm_gradients_kernel(params, &row_refs, &targets, &mut out, &mut z);
    Ok(out)
}

/// Shared gradient kernel over pre-converted ±1 spin rows. `out` is
/// overwritten; `z` is K-length scratch.
pub(crate) fn fm_gradients_kernel(
    params: &FmParams,
    rows: &[&[f64]],
    targets: &[f64],
    out: &mut FmGradients,
    z: &mut [f64],
) {
    let n = params.n;
    let k = params.k;
    out.v.fill(0.0);
    out.w.fill(0.0);
    out.w0 = 0.0;
    let mut err_sum = 0.0;
    let v_sum_sq = params.factor_sum_sq();

    for (&spins, &target) in rows.iter().zip(targets) {
        let pred = params.predict_kernel(spins, z, v_sum_sq);
        let e = (pred - target).tanh();
        err_sum += e;
        out.w0 += e;
        for (g, &si) in out.w.iter_mut().zip(spins) {
            *g += e * si;
        }
        for (kk, &zk) in z.iter().enumerate() {
            let ezk = e * zk;
            let col = &mut out.v[kk * n..(kk + 1) * n];
            for (g, &si) in col.iter_mut().zip(spins) {
                *g += ezk * si;
            }
        }
    }

    // The -e·v_ik part of the factor gradient summed over the batch is
    // -(Σ_b e_b)·v_ik; fold it in once.
    let inv = 1.0 / rows.len() as f64;
    for (g, &vik) in out.v.iter_mut().zip(params.v.iter()) {
        *g = (*g - err_sum * vik) * inv;
    }
    for g in &mut out.w {
        *g *= inv;
    }
    out.w0 *= inv;
}
