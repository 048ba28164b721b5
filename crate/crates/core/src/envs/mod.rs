//! Toy regret landscapes and the point-mass world.

mod goal_space;
mod landscape;
mod point_mass;
mod reward;

pub use goal_space::GoalSpace;
pub use landscape::{
    landscape_regret, LandscapeConfig, DRIFT_RATE, FINAL_CENTER, FLOOR, INITIAL_CENTER,
    PEAK_RADIUS_SQ,
};
pub use point_mass::{
    PointMass, PointMassConfig, PointMassState, Rect, StepOutcome, ACTION_DIM, CORRIDOR_START,
    DEFAULT_START, DESK_EPISODE_LENGTH, MAX_SPEED, OBS_DIM, PAPER_EPISODE_LENGTH, POCKET,
    VELOCITY_OBS_SCALE, WALL_HORIZONTAL, WALL_VERTICAL, WORLD_HALF_WIDTH,
};
pub use reward::{RewardKind, RewardSpec};

/// Point-mass in-distribution goal box.
pub fn point_mass_g_id() -> GoalSpace {
    GoalSpace::square(0.25)
}

/// Point-mass out-of-distribution evaluation box.
pub fn point_mass_g_ood() -> GoalSpace {
    GoalSpace::square(0.3)
}

/// Point-mass success tolerance.
pub const POINT_MASS_EPSILON: f64 = 0.05;
