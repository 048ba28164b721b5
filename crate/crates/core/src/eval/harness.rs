use serde::{Deserialize, Serialize};

use super::rollout::run_episode;
use crate::envs::{GoalSpace, PointMass, RewardSpec, POCKET};
use crate::error::{Error, Result};
use crate::learner::{ActMode, Learner};
use crate::rng::StreamRng;

/// Where evaluation goals come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoalSource {
    Uniform(GoalSpace),
    /// Uniform over `outer` minus `inner`.
    Annulus {
        outer: GoalSpace,
        inner: GoalSpace,
    },
    /// Episode `i` uses goal `i mod len`.
    List(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSpec {
    pub name: String,
    pub source: GoalSource,
    pub episodes: usize,
    pub deterministic: bool,
    pub epsilon: f64,
    /// Full goal space of the policy. Goals shorter than it are padded with
    /// uniform draws from its trailing dimensions.
    pub policy_goal_space: Option<GoalSpace>,
}

impl EvalSpec {
    pub fn uniform(name: &str, space: GoalSpace, episodes: usize, epsilon: f64) -> Self {
        Self {
            name: name.to_string(),
            source: GoalSource::Uniform(space),
            episodes,
            deterministic: true,
            epsilon,
            policy_goal_space: None,
        }
    }

    pub fn list(name: &str, goals: Vec<Vec<f64>>, episodes: usize, epsilon: f64) -> Self {
        Self {
            source: GoalSource::List(goals),
            ..Self::uniform(name, GoalSpace::square(1.0), episodes, epsilon)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.episodes == 0 {
            return Err(Error::Config(format!(
                "eval '{}': episodes must be at least 1",
                self.name
            )));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::Config(format!(
                "eval '{}': epsilon must be positive",
                self.name
            )));
        }
        if matches!(&self.source, GoalSource::List(g) if g.is_empty()) {
            return Err(Error::Config(format!(
                "eval '{}': empty goal list",
                self.name
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoalResult {
    pub goal: Vec<f64>,
    pub success: bool,
    pub final_distance: f64,
    pub steps: usize,
}

/// One evaluation event, written as a line of `evals.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub round: u64,
    pub goal_set_name: String,
    pub n_episodes: usize,
    pub success_rate: f64,
    pub per_goal: Vec<GoalResult>,
}

impl EvalReport {
    pub fn successes(&self) -> usize {
        self.per_goal.iter().filter(|g| g.success).count()
    }
}

/// Success rate of `policy` under `spec`, starting every episode from the
/// environment's default start. Never mutates the policy.
pub fn evaluate(
    policy: &Learner,
    spec: &EvalSpec,
    env: &PointMass,
    reward: &RewardSpec,
    round: u64,
    rng: &mut StreamRng,
) -> Result<EvalReport> {
    spec.validate()?;
    let reward = RewardSpec {
        epsilon: spec.epsilon,
        ..*reward
    };
    let mode = if spec.deterministic {
        ActMode::Deterministic
    } else {
        ActMode::Stochastic
    };
    let mut per_goal = Vec::with_capacity(spec.episodes);
    for i in 0..spec.episodes {
        let mut goal = match &spec.source {
            GoalSource::Uniform(space) => space.sample(rng),
            GoalSource::Annulus { outer, inner } => outer.sample_excluding(inner, rng),
            GoalSource::List(goals) => goals[i % goals.len()].clone(),
        };
        if let Some(full) = &spec.policy_goal_space {
            for d in goal.len()..full.dim() {
                goal.push(rng.uniform(full.low()[d], full.high()[d]));
            }
        }
        let ep = run_episode(policy, env, env.reset_default(), &goal, &reward, mode, rng)?;
        per_goal.push(GoalResult {
            final_distance: reward.distance(&ep.final_position(), &goal),
            success: ep.success,
            steps: ep.steps(),
            goal,
        });
    }
    let successes = per_goal.iter().filter(|g| g.success).count();
    Ok(EvalReport {
        round,
        goal_set_name: spec.name.clone(),
        n_episodes: spec.episodes,
        success_rate: successes as f64 / spec.episodes as f64,
        per_goal,
    })
}

pub const SKILL_GOAL_SETS: [&str; 1] = ["behind_obstacles"];

/// Fixed goals for a named skill.
///
/// `behind_obstacles` sits in the pocket enclosed by the two walls; the only
/// way in is under the horizontal wall and up past its right end.
pub fn skill_goal_set(name: &str) -> Result<Vec<Vec<f64>>> {
    match name {
        "behind_obstacles" => Ok(vec![
            vec![0.14, 0.10],
            vec![0.14, 0.20],
            vec![0.20, 0.15],
            vec![0.22, 0.22],
            vec![0.17, 0.08],
        ]),
        other => Err(Error::Config(format!(
            "unknown skill goal set '{other}' (known: {})",
            SKILL_GOAL_SETS.join(", ")
        ))),
    }
}

/// Whether `p` lies in the walled pocket region.
pub fn in_pocket(p: &[f64]) -> bool {
    POCKET.interior_contains([p[0], p[1]])
}
