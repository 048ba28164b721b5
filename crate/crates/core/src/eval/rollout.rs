use crate::envs::{PointMass, PointMassState, RewardSpec};
use crate::error::Result;
use crate::learner::{ActMode, Learner, Transition};
use crate::rng::StreamRng;

/// One finished episode.
#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    pub start: PointMassState,
    pub final_state: PointMassState,
    pub transitions: Vec<Transition>,
    /// Undiscounted sum of environment rewards.
    pub ret: f64,
    pub success: bool,
}

impl Episode {
    pub fn steps(&self) -> usize {
        self.transitions.len()
    }

    pub fn final_position(&self) -> [f64; 2] {
        self.final_state.position
    }

    /// `sum_t gamma^t r_t` over the collected rewards.
    pub fn discounted_return(&self, gamma: f64) -> f64 {
        self.transitions
            .iter()
            .rev()
            .fold(0.0, |acc, t| t.reward + gamma * acc)
    }
}

/// Runs `learner` toward `goal` from `start` until success or the time
/// limit. A start already within tolerance of the goal counts as success
/// with zero steps taken.
pub fn run_episode(
    learner: &Learner,
    env: &PointMass,
    start: PointMassState,
    goal: &[f64],
    spec: &RewardSpec,
    mode: ActMode,
    rng: &mut StreamRng,
) -> Result<Episode> {
    let mut episode = Episode {
        start,
        final_state: start,
        transitions: Vec::new(),
        ret: 0.0,
        success: spec.success(&start.position, goal),
    };
    if episode.success {
        return Ok(episode);
    }
    let mut state = start;
    let mut obs = state.observation();
    for _ in 0..env.config.episode_length {
        let action = learner.act(&obs, goal, mode, rng)?;
        let out = env.step(&state, &action, goal, spec)?;
        let next_obs = out.state.observation();
        episode.ret += out.reward;
        episode.transitions.push(Transition {
            obs,
            action,
            reward: out.reward,
            next_obs: next_obs.clone(),
            done: out.success,
            goal: goal.to_vec(),
        });
        state = out.state;
        obs = next_obs;
        if out.success {
            episode.success = true;
            break;
        }
    }
    episode.final_state = state;
    Ok(episode)
}

/// Runs the full time limit with zero reward at every step, for policies
/// that are not reaching for a goal (the goal is only an input).
pub fn run_free_episode(
    learner: &Learner,
    env: &PointMass,
    start: PointMassState,
    goal: &[f64],
    mode: ActMode,
    rng: &mut StreamRng,
) -> Result<Episode> {
    // A tolerance of zero makes success impossible.
    let spec = RewardSpec {
        epsilon: 0.0,
        ..RewardSpec::dense(1.0)
    };
    let mut state = start;
    let mut obs = state.observation();
    let mut transitions = Vec::with_capacity(env.config.episode_length);
    for _ in 0..env.config.episode_length {
        let action = learner.act(&obs, goal, mode, rng)?;
        let out = env.step(&state, &action, goal, &spec)?;
        let next_obs = out.state.observation();
        transitions.push(Transition {
            obs,
            action,
            reward: 0.0,
            next_obs: next_obs.clone(),
            done: false,
            goal: goal.to_vec(),
        });
        state = out.state;
        obs = next_obs;
    }
    Ok(Episode {
        start,
        final_state: state,
        transitions,
        ret: 0.0,
        success: false,
    })
}
