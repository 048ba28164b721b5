use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Soft actor-critic hyperparameters shared by learners and goal generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SacConfig {
    pub gamma: f64,
    pub init_alpha: f64,
    pub alpha_lr: f64,
    pub actor_lr: f64,
    pub critic_lr: f64,
    pub batch_size: usize,
    pub tau: f64,
    /// Defaults to `-(action dimensionality)` when unset.
    pub target_entropy: Option<f64>,
    /// Pins the temperature at `init_alpha` (zero disables the entropy term).
    pub fixed_alpha: bool,
    pub hidden_dim: usize,
    pub hidden_depth: usize,
    pub buffer_capacity: usize,
}

impl Default for SacConfig {
    fn default() -> Self {
        Self::desk()
    }
}

impl SacConfig {
    /// Desk-scale learner defaults.
    pub fn desk() -> Self {
        Self {
            gamma: 0.99,
            init_alpha: 0.1,
            alpha_lr: 1e-4,
            actor_lr: 1e-4,
            critic_lr: 1e-4,
            batch_size: 64,
            tau: 0.005,
            target_entropy: None,
            fixed_alpha: false,
            hidden_dim: 64,
            hidden_depth: 2,
            buffer_capacity: 1_000_000,
        }
    }

    /// Table values used by the original large-scale runs.
    pub fn paper() -> Self {
        Self {
            batch_size: 1024,
            hidden_dim: 1024,
            ..Self::desk()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(format!("sac: {what}")));
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return bad("gamma must lie in (0, 1]");
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return bad("tau must lie in (0, 1]");
        }
        if !(self.init_alpha > 0.0 || (self.fixed_alpha && self.init_alpha == 0.0)) {
            return bad("init_alpha must be positive unless pinned at zero");
        }
        if self.batch_size == 0 || self.hidden_dim == 0 || self.buffer_capacity == 0 {
            return bad("batch_size, hidden_dim and buffer_capacity must be positive");
        }
        for (name, lr) in [
            ("alpha_lr", self.alpha_lr),
            ("actor_lr", self.actor_lr),
            ("critic_lr", self.critic_lr),
        ] {
            if !(lr > 0.0 && lr.is_finite()) {
                return bad(&format!("{name} must be positive"));
            }
        }
        Ok(())
    }

    pub(crate) fn layer_dims(&self, input: usize, output: usize) -> Vec<usize> {
        let mut dims = vec![input];
        dims.extend(std::iter::repeat_n(self.hidden_dim, self.hidden_depth));
        dims.push(output);
        dims
    }
}
