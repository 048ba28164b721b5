//! Damped 2-D point mass in a box with two wall segments in the top-right
//! quadrant.
//!
//! The walls form an L around a pocket that can only be entered through a
//! gap at its lower right. Integration is semi-implicit Euler with unit time
//! step; walls and world edges are resolved one axis at a time with a swept
//! test, so the point can never tunnel through a wall.

use serde::{Deserialize, Serialize};

use super::reward::RewardSpec;
use crate::error::{check_dim, Result};
use crate::rng::StreamRng;

pub const WORLD_HALF_WIDTH: f64 = 0.3;
pub const DEFAULT_START: [f64; 2] = [0.0, 0.0];
pub const DAMPING: f64 = 0.6;
pub const FORCE_SCALE: f64 = 0.016;
/// Terminal speed per axis under a saturated action.
pub const MAX_SPEED: f64 = FORCE_SCALE / (1.0 - DAMPING);
pub const DESK_EPISODE_LENGTH: usize = 50;
pub const PAPER_EPISODE_LENGTH: usize = 1000;
pub const CORRIDOR_START_PROB: f64 = 0.1;
/// Observations carry `velocity * VELOCITY_OBS_SCALE`.
pub const VELOCITY_OBS_SCALE: f64 = 10.0;
pub const OBS_DIM: usize = 4;
pub const ACTION_DIM: usize = 2;

/// Closed axis-aligned rectangle; its interior is the open rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub const fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    pub fn interior_contains(&self, p: [f64; 2]) -> bool {
        self.x0 < p[0] && p[0] < self.x1 && self.y0 < p[1] && p[1] < self.y1
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        self.x0 <= p[0] && p[0] <= self.x1 && self.y0 <= p[1] && p[1] <= self.y1
    }
}

/// Vertical wall closing the pocket on the left, up to the world edge.
pub const WALL_VERTICAL: Rect = Rect::new(0.08, 0.10, 0.02, 0.30);
/// Horizontal wall closing the pocket from below, leaving a gap on the right.
pub const WALL_HORIZONTAL: Rect = Rect::new(0.08, 0.22, 0.02, 0.04);
/// Region enclosed by the two walls.
pub const POCKET: Rect = Rect::new(0.10, 0.30, 0.04, 0.30);
/// Start region used for the occasional between-the-walls reset.
pub const CORRIDOR_START: Rect = Rect::new(0.13, 0.19, 0.08, 0.20);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointMassConfig {
    pub episode_length: usize,
    pub walls: Vec<Rect>,
    pub start: [f64; 2],
    pub corridor_start: Rect,
    pub corridor_start_prob: f64,
    pub world_half_width: f64,
    pub damping: f64,
    pub force_scale: f64,
}

impl Default for PointMassConfig {
    fn default() -> Self {
        Self {
            episode_length: DESK_EPISODE_LENGTH,
            walls: vec![WALL_VERTICAL, WALL_HORIZONTAL],
            start: DEFAULT_START,
            corridor_start: CORRIDOR_START,
            corridor_start_prob: CORRIDOR_START_PROB,
            world_half_width: WORLD_HALF_WIDTH,
            damping: DAMPING,
            force_scale: FORCE_SCALE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointMassState {
    pub position: [f64; 2],
    pub velocity: [f64; 2],
    pub time_step: usize,
}

impl PointMassState {
    pub fn at(position: [f64; 2]) -> Self {
        Self {
            position,
            velocity: [0.0, 0.0],
            time_step: 0,
        }
    }

    pub fn observation(&self) -> Vec<f64> {
        vec![
            self.position[0],
            self.position[1],
            self.velocity[0] * VELOCITY_OBS_SCALE,
            self.velocity[1] * VELOCITY_OBS_SCALE,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub state: PointMassState,
    pub reward: f64,
    pub success: bool,
    /// `success || time limit reached`.
    pub done: bool,
}

/// The point-mass world. Holds configuration only; states are plain values.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointMass {
    pub config: PointMassConfig,
}

impl PointMass {
    pub fn new(config: PointMassConfig) -> Self {
        Self { config }
    }

    pub fn obs_dim(&self) -> usize {
        OBS_DIM
    }

    pub fn action_dim(&self) -> usize {
        ACTION_DIM
    }

    /// Default start with probability `1 - corridor_start_prob`, otherwise a
    /// uniform point between the walls. Velocity zero.
    pub fn reset(&self, rng: &mut StreamRng) -> (PointMassState, Vec<f64>) {
        let draw = rng.unit();
        let state = if draw < self.config.corridor_start_prob {
            let r = &self.config.corridor_start;
            PointMassState::at([rng.uniform(r.x0, r.x1), rng.uniform(r.y0, r.y1)])
        } else {
            PointMassState::at(self.config.start)
        };
        let obs = state.observation();
        (state, obs)
    }

    pub fn reset_default(&self) -> PointMassState {
        PointMassState::at(self.config.start)
    }

    pub fn in_world(&self, p: &[f64]) -> bool {
        let h = self.config.world_half_width;
        p.iter().take(2).all(|x| (-h..=h).contains(x))
    }

    pub fn clamp_to_world(&self, p: &[f64]) -> Vec<f64> {
        let h = self.config.world_half_width;
        p.iter().map(|x| x.clamp(-h, h)).collect()
    }

    pub fn inside_wall(&self, p: [f64; 2]) -> bool {
        self.config.walls.iter().any(|w| w.interior_contains(p))
    }

    /// Advances one step. Actions are clamped into `[-1, 1]^2`; the reward is
    /// evaluated on the post-step position.
    pub fn step(
        &self,
        state: &PointMassState,
        action: &[f64],
        goal: &[f64],
        spec: &RewardSpec,
    ) -> Result<StepOutcome> {
        check_dim("point-mass action", ACTION_DIM, action.len())?;
        let cfg = &self.config;
        let a = [action[0].clamp(-1.0, 1.0), action[1].clamp(-1.0, 1.0)];
        let mut vel = [
            cfg.damping * state.velocity[0] + cfg.force_scale * a[0],
            cfg.damping * state.velocity[1] + cfg.force_scale * a[1],
        ];
        let mut pos = state.position;

        // x first, then y with the updated x.
        for axis in 0..2 {
            let other = 1 - axis;
            let from = pos[axis];
            let mut to = from + vel[axis];
            for w in &cfg.walls {
                let (lo, hi, olo, ohi) = if axis == 0 {
                    (w.x0, w.x1, w.y0, w.y1)
                } else {
                    (w.y0, w.y1, w.x0, w.x1)
                };
                if !(olo < pos[other] && pos[other] < ohi) {
                    continue;
                }
                if vel[axis] > 0.0 && from <= lo && to > lo {
                    to = lo;
                    vel[axis] = 0.0;
                } else if vel[axis] < 0.0 && from >= hi && to < hi {
                    to = hi;
                    vel[axis] = 0.0;
                }
            }
            let h = cfg.world_half_width;
            if to > h || to < -h {
                to = to.clamp(-h, h);
                vel[axis] = 0.0;
            }
            pos[axis] = to;
        }

        let next = PointMassState {
            position: pos,
            velocity: vel,
            time_step: state.time_step + 1,
        };
        let reward = spec.reward(&pos, goal);
        let success = spec.success(&pos, goal);
        Ok(StepOutcome {
            state: next,
            reward,
            success,
            done: success || next.time_step >= cfg.episode_length,
        })
    }
}
