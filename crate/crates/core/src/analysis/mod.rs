//! Closed-loop assembly, eigenvalue loci, delay margins and controller
//! gain sensitivity.

mod closure;
mod delay;
mod sensitivity;
mod sweep;

pub use closure::{close_loop, measurement_origin, REF_PREFIX};
pub use delay::{pade_block, CommMask, DelayModel, LinkDelay};
pub use sensitivity::{gain_sensitivity, SensitivityRow};
pub use sweep::{delay_margin, is_unstable, sweep_eigen, DelayMargin, EigenLocus, LoopOptions, SweepAxis, UNSTABLE_TOL};
