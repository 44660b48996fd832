//! Online black-box optimization of discrete actions in drifting
//! environments.
//!
//! A factorization-machine surrogate is trained on a sliding window of
//! recent observations, combined with an exploration incentive and a
//! one-hot encoding penalty into a single acquisition objective, and handed
//! to a ballistic simulated-bifurcation solver that proposes the next
//! action. Reference environments (a drifting random-Ising benchmark and a
//! cellular beamforming simulator), baseline policies, and an experiment
//! runner with CSV/JSON outputs round out the crate.
//!
//! The `parallel` feature (default) runs trials and multi-reward training
//! on rayon; disabling it falls back to sequential loops with identical
//! results.

pub mod adaptation;
pub mod encoding;
pub mod envs;
pub mod error;
pub mod ising;
pub mod optimizer;
pub mod par;
pub mod runner;
pub mod surrogate;

pub(crate) mod kernels;
pub(crate) mod seed;

pub use error::{Error, Result};
