use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learner::SacConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorConfig {
    /// Network sizes, learning rates and temperature. `gamma` and `tau` are
    /// unused: generator episodes last one step.
    pub sac: SacConfig,
    pub updates_per_round: usize,
    /// First round at which stored regrets are re-estimated.
    pub refresh_start: u64,
    /// Weight on the old regret in the refresh blend; 1 disables refresh.
    pub beta: f64,
    /// Refresh every this many rounds once `refresh_start` is reached.
    pub refresh_interval: u64,
    pub noise_dim: usize,
    /// When false the buffer only ever holds the current round's records.
    pub keep_history: bool,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            sac: SacConfig {
                batch_size: 32,
                hidden_dim: 32,
                ..SacConfig::desk()
            },
            updates_per_round: 100,
            refresh_start: 100,
            beta: 0.5,
            refresh_interval: 1,
            noise_dim: 2,
            keep_history: true,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        self.sac.validate()?;
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::Config(format!(
                "generator beta {} outside [0, 1]",
                self.beta
            )));
        }
        if self.refresh_interval == 0 {
            return Err(Error::Config(
                "generator refresh_interval must be positive".into(),
            ));
        }
        Ok(())
    }
}
