//! Curriculum self play: two goal-conditioned soft actor-critic learners and
//! two regret-maximizing one-step goal generators, plus baselines, toy regret
//! landscapes and evaluation protocols.

pub mod autodiff;
pub mod bench;
pub mod config;
pub mod envs;
pub mod error;
pub mod eval;
pub mod game;
pub mod goalgen;
pub mod learner;
pub mod rng;

pub use error::{Error, Result};
