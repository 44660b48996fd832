//! Black-box environments and reference policies.

pub mod synthetic;
pub mod wireless;

use rand::Rng;

use crate::encoding::{Action, ActionSpace};

pub use synthetic::{SyntheticConfig, SyntheticDynamicEnv};
pub use wireless::{WirelessConfig, WirelessEnv};

/// Uniformly random action, one independent draw per input.
pub fn random_action(space: &ActionSpace, rng: &mut impl Rng) -> Action {
    Action::new(
        (0..space.n_inputs())
            .map(|l| rng.random_range(0..space.cardinality(l)))
            .collect(),
    )
}
