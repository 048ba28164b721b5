use serde::{Deserialize, Serialize};

use crate::envs::{
    point_mass_g_id, point_mass_g_ood, GoalSpace, PointMass, PointMassConfig, RewardKind,
    RewardSpec, DESK_EPISODE_LENGTH, POINT_MASS_EPSILON,
};
use crate::error::{Error, Result};
use crate::learner::HerStrategy;

/// Environment and episode settings shared by every player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvSpec {
    pub episode_length: usize,
    pub reward: RewardKind,
    pub epsilon: f64,
    /// Appends one goal dimension that no state can ever match.
    pub misspecified: bool,
    /// Hindsight copies per transition; 0 disables relabeling.
    pub her_k: usize,
    pub her_strategy: HerStrategy,
    /// Use `gamma`-discounted returns in regrets instead of plain sums.
    pub discounted_returns: bool,
}

impl Default for EnvSpec {
    fn default() -> Self {
        Self {
            episode_length: DESK_EPISODE_LENGTH,
            reward: RewardKind::Dense,
            epsilon: POINT_MASS_EPSILON,
            misspecified: false,
            her_k: 4,
            her_strategy: HerStrategy::Future,
            discounted_returns: false,
        }
    }
}

impl EnvSpec {
    pub fn validate(&self) -> Result<()> {
        if self.episode_length == 0 {
            return Err(Error::Config("env.episode_length must be positive".into()));
        }
        self.reward_spec().validate()
    }

    pub fn env(&self) -> PointMass {
        PointMass::new(PointMassConfig {
            episode_length: self.episode_length,
            ..PointMassConfig::default()
        })
    }

    pub fn reward_spec(&self) -> RewardSpec {
        RewardSpec {
            kind: self.reward,
            epsilon: self.epsilon,
            feasible_dims: 2,
        }
    }

    /// Training goal space, including the impossible dimension if any.
    pub fn goal_space(&self) -> GoalSpace {
        let g = point_mass_g_id();
        if self.misspecified {
            g.append_misspecified_dim()
        } else {
            g
        }
    }

    pub fn feasible_goal_space(&self) -> GoalSpace {
        point_mass_g_id()
    }

    pub fn ood_goal_space(&self) -> GoalSpace {
        point_mass_g_ood()
    }
}
