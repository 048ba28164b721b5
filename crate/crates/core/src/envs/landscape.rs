//! Synthetic regret landscape: flat at `-0.01` except for a quadratic peak of
//! squared radius `0.01` whose center may drift diagonally each round.
//!
//! The drift rate is the fraction of the diagonal path from `(-0.1, 0.1)` to
//! `(0.1, -0.1)` covered per round: at `2e-4` the center passes the origin at
//! round 2500 and arrives at `(0.1, -0.1)` at round 5000.

use serde::{Deserialize, Serialize};

pub const PEAK_RADIUS_SQ: f64 = 0.01;
pub const FLOOR: f64 = -0.01;
pub const INITIAL_CENTER: [f64; 2] = [-0.1, 0.1];
pub const FINAL_CENTER: [f64; 2] = [0.1, -0.1];
pub const DRIFT_RATE: f64 = 2e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandscapeConfig {
    /// Fraction of the diagonal path covered per round; zero for the
    /// stationary case.
    pub drift_rate: f64,
}

impl LandscapeConfig {
    pub fn stationary() -> Self {
        Self { drift_rate: 0.0 }
    }

    pub fn drifting() -> Self {
        Self {
            drift_rate: DRIFT_RATE,
        }
    }

    pub fn center(&self, round: u64) -> [f64; 2] {
        let progress = self.drift_rate * round as f64;
        [
            INITIAL_CENTER[0] + progress * (FINAL_CENTER[0] - INITIAL_CENTER[0]),
            INITIAL_CENTER[1] + progress * (FINAL_CENTER[1] - INITIAL_CENTER[1]),
        ]
    }

    pub fn regret(&self, point: &[f64], round: u64) -> f64 {
        let c = self.center(round);
        let d2 = (point[0] - c[0]).powi(2) + (point[1] - c[1]).powi(2);
        if d2 < PEAK_RADIUS_SQ {
            -d2
        } else {
            FLOOR
        }
    }

    /// Analytic gradient of [`regret`](Self::regret); zero on the plateau.
    pub fn gradient(&self, point: &[f64], round: u64) -> [f64; 2] {
        let c = self.center(round);
        let (dx, dy) = (point[0] - c[0], point[1] - c[1]);
        if dx * dx + dy * dy < PEAK_RADIUS_SQ {
            [-2.0 * dx, -2.0 * dy]
        } else {
            [0.0, 0.0]
        }
    }

    pub fn distance_to_center(&self, point: &[f64], round: u64) -> f64 {
        let c = self.center(round);
        ((point[0] - c[0]).powi(2) + (point[1] - c[1]).powi(2)).sqrt()
    }
}

/// Landscape value at `point` and `round`.
pub fn landscape_regret(cfg: &LandscapeConfig, point: &[f64], round: u64) -> f64 {
    cfg.regret(point, round)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peak_and_plateau_values() {
        let cfg = LandscapeConfig::stationary();
        assert_eq!(landscape_regret(&cfg, &[-0.1, 0.1], 0), 0.0);
        assert_eq!(landscape_regret(&cfg, &[0.5, 0.5], 0), -0.01);
        assert_eq!(cfg.center(10_000), INITIAL_CENTER);
    }

    #[test]
    fn drifting_center_reaches_origin_at_2500() {
        let cfg = LandscapeConfig::drifting();
        let c = cfg.center(2500);
        assert!(c[0].abs() < 1e-12 && c[1].abs() < 1e-12);
        assert!(landscape_regret(&cfg, &[0.0, 0.0], 2500).abs() < 1e-20);
        let end = cfg.center(5000);
        assert!((end[0] - 0.1).abs() < 1e-12 && (end[1] + 0.1).abs() < 1e-12);
    }

    #[test]
    fn grid_argmax_is_the_center() {
        let cfg = LandscapeConfig::stationary();
        let mut best = (f64::NEG_INFINITY, [0.0, 0.0]);
        for i in 0..201 {
            for j in 0..201 {
                let p = [-1.0 + 0.01 * i as f64, -1.0 + 0.01 * j as f64];
                let v = cfg.regret(&p, 0);
                assert!((FLOOR..=0.0).contains(&v));
                if v > best.0 {
                    best = (v, p);
                }
            }
        }
        assert!((best.1[0] + 0.1).abs() <= 0.005 && (best.1[1] - 0.1).abs() <= 0.005);
    }

    #[test]
    fn gradient_is_zero_on_the_plateau() {
        let cfg = LandscapeConfig::stationary();
        assert_eq!(cfg.gradient(&[0.0, 0.0], 0), [0.0, 0.0]);
        let g = cfg.gradient(&[-0.05, 0.1], 0);
        assert!((g[0] + 0.1).abs() < 1e-12 && g[1].abs() < 1e-12);
    }
}
