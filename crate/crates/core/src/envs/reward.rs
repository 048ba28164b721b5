use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardKind {
    /// `-||s - g||`
    Dense,
    /// `1{||s - g|| < epsilon}`
    Sparse,
}

/// Goal-conditioned reward and success predicate.
///
/// Only the first `feasible_dims` goal components are compared against the
/// achieved position; any extra goal dimensions never influence reward or
/// success.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardSpec {
    pub kind: RewardKind,
    pub epsilon: f64,
    pub feasible_dims: usize,
}

impl RewardSpec {
    pub fn dense(epsilon: f64) -> Self {
        Self {
            kind: RewardKind::Dense,
            epsilon,
            feasible_dims: 2,
        }
    }

    pub fn sparse(epsilon: f64) -> Self {
        Self {
            kind: RewardKind::Sparse,
            ..Self::dense(epsilon)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || self.feasible_dims == 0 {
            return Err(Error::Config(format!("invalid reward spec {self:?}")));
        }
        Ok(())
    }

    /// Euclidean distance on the feasible dimensions.
    pub fn distance(&self, achieved: &[f64], goal: &[f64]) -> f64 {
        achieved
            .iter()
            .zip(goal)
            .take(self.feasible_dims)
            .map(|(a, g)| (a - g) * (a - g))
            .sum::<f64>()
            .sqrt()
    }

    pub fn success(&self, achieved: &[f64], goal: &[f64]) -> bool {
        self.distance(achieved, goal) < self.epsilon
    }

    pub fn reward(&self, achieved: &[f64], goal: &[f64]) -> f64 {
        match self.kind {
            RewardKind::Dense => -self.distance(achieved, goal),
            RewardKind::Sparse => {
                if self.success(achieved, goal) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}
