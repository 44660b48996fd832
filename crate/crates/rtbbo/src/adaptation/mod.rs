//! Dynamic adaptation machinery: the sliding-window dataset, the
//! exploration incentive with its self-tuned coefficient, and assembly of
//! the acquisition objective handed to the solver.

mod acquisition;
mod incentive;
mod window;

pub use acquisition::{assemble_acquisition, integrate_multi};
pub use incentive::{IncentiveConfig, IncentiveState};
pub use window::{Sample, SlidingWindow};
