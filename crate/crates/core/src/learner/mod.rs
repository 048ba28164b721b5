//! Goal-conditioned SAC learners (Alice and Bob).

mod config;
mod her;
mod replay;
mod sac;

pub use config::SacConfig;
pub use her::{achieved_goal, her_relabel, HerStrategy};
pub use replay::ReplayBuffer;
pub(crate) use sac::{initial_log_alpha, policy_step, regression_step, PolicyStep};
pub use sac::{ActMode, Learner, LossReport, Transition};
