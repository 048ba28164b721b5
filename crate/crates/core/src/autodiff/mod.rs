//! Networks, gradients, Adam, and squashed-Gaussian policy heads.

mod adam;
mod checkpoint;
mod gradcheck;
mod mlp;
mod squash;

pub use adam::{AdamConfig, AdamState};
pub use checkpoint::{Checkpoint, CHECKPOINT_VERSION};
pub use gradcheck::{gradcheck, relative_error, GradCheck};
pub use mlp::{Activation, Gradients, Mlp, Tape};
pub(crate) use squash::check_bounds;
pub use squash::{
    head_gradients, head_means, sample_head_batch, squashed_gaussian, squashed_log_prob,
    squashed_mean, SquashedGaussianOutput, LOG_STD_MAX, LOG_STD_MIN,
};
