use serde::{Deserialize, Serialize};

use crate::autodiff::check_bounds;
use crate::error::{Error, Result};
use crate::rng::StreamRng;

/// Axis-aligned box of goals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGoalSpace")]
pub struct GoalSpace {
    low: Vec<f64>,
    high: Vec<f64>,
}

#[derive(Deserialize)]
struct RawGoalSpace {
    low: Vec<f64>,
    high: Vec<f64>,
}

impl TryFrom<RawGoalSpace> for GoalSpace {
    type Error = Error;

    fn try_from(raw: RawGoalSpace) -> Result<Self> {
        GoalSpace::new(raw.low, raw.high)
    }
}

impl GoalSpace {
    pub fn new(low: Vec<f64>, high: Vec<f64>) -> Result<Self> {
        if low.is_empty() {
            return Err(Error::Config(
                "goal space needs at least one dimension".into(),
            ));
        }
        check_bounds(&low, &high)?;
        Ok(Self { low, high })
    }

    /// The square `[-half, half]^2`.
    pub fn square(half: f64) -> Self {
        Self::new(vec![-half, -half], vec![half, half]).expect("positive half width")
    }

    pub fn dim(&self) -> usize {
        self.low.len()
    }

    pub fn low(&self) -> &[f64] {
        &self.low
    }

    pub fn high(&self) -> &[f64] {
        &self.high
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.low
            .iter()
            .zip(&self.high)
            .map(|(l, h)| 0.5 * (l + h))
            .collect()
    }

    pub fn contains(&self, g: &[f64]) -> bool {
        g.len() == self.dim()
            && g.iter()
                .zip(self.low.iter().zip(&self.high))
                .all(|(x, (l, h))| *l <= *x && *x <= *h)
    }

    /// Componentwise containment of another box.
    pub fn contains_space(&self, other: &GoalSpace) -> bool {
        other.dim() == self.dim()
            && other.low.iter().zip(&self.low).all(|(o, s)| o >= s)
            && other.high.iter().zip(&self.high).all(|(o, s)| o <= s)
    }

    pub fn sample(&self, rng: &mut StreamRng) -> Vec<f64> {
        self.low
            .iter()
            .zip(&self.high)
            .map(|(l, h)| rng.uniform(*l, *h))
            .collect()
    }

    /// Uniform sample from `self` minus the interior of `inner` (rejection).
    pub fn sample_excluding(&self, inner: &GoalSpace, rng: &mut StreamRng) -> Vec<f64> {
        loop {
            let g = self.sample(rng);
            let strictly_inside = g.len() == inner.dim()
                && g.iter()
                    .zip(inner.low.iter().zip(&inner.high))
                    .all(|(x, (l, h))| *l < *x && *x < *h);
            if !strictly_inside {
                return g;
            }
        }
    }

    /// Appends one extra goal dimension bounded in `[-1, 1]`.
    pub fn append_misspecified_dim(&self) -> GoalSpace {
        let mut low = self.low.clone();
        let mut high = self.high.clone();
        low.push(-1.0);
        high.push(1.0);
        GoalSpace { low, high }
    }

    /// Clamps a point into the box.
    pub fn clamp(&self, g: &[f64]) -> Vec<f64> {
        g.iter()
            .zip(self.low.iter().zip(&self.high))
            .map(|(x, (l, h))| x.clamp(*l, *h))
            .collect()
    }
}
