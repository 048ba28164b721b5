//! Tanh-squashed Gaussian heads rescaled onto an axis-aligned box.
//!
//! With `u = mean + std * noise`, the action is
//! `low + (tanh(u) + 1) / 2 * (high - low)` and its log-density carries the
//! change-of-variables terms for both the tanh and the affine rescale.

use crate::error::{check_dim, Error, Result};

pub const LOG_STD_MIN: f64 = -10.0;
pub const LOG_STD_MAX: f64 = 2.0;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// `ln(1 - tanh(u)^2)` without cancellation for large `|u|`.
fn log_one_minus_tanh_sq(u: f64) -> f64 {
    2.0 * (std::f64::consts::LN_2 - u - softplus(-2.0 * u))
}

pub(crate) fn check_bounds(low: &[f64], high: &[f64]) -> Result<()> {
    check_dim("bounds", low.len(), high.len())?;
    for (i, (l, h)) in low.iter().zip(high).enumerate() {
        if !(l.is_finite() && h.is_finite() && l < h) {
            return Err(Error::Config(format!(
                "degenerate bounds in dimension {i}: [{l}, {h}]"
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SquashedGaussianOutput {
    pub mean: Vec<f64>,
    /// Clamped into `[LOG_STD_MIN, LOG_STD_MAX]`.
    pub log_std: Vec<f64>,
    pub noise: Vec<f64>,
    /// Pre-squash sample `mean + exp(log_std) * noise`.
    pub pre_tanh: Vec<f64>,
    pub action: Vec<f64>,
    pub log_prob: f64,
    clamped: Vec<bool>,
    half_width: Vec<f64>,
}

/// Samples (reparameterized by `noise`) from the squashed Gaussian.
pub fn squashed_gaussian(
    mean: &[f64],
    log_std: &[f64],
    low: &[f64],
    high: &[f64],
    noise: &[f64],
) -> Result<SquashedGaussianOutput> {
    check_bounds(low, high)?;
    let n = mean.len();
    check_dim("log_std", n, log_std.len())?;
    check_dim("noise", n, noise.len())?;
    check_dim("bounds", n, low.len())?;

    let mut out = SquashedGaussianOutput {
        mean: mean.to_vec(),
        log_std: Vec::with_capacity(n),
        noise: noise.to_vec(),
        pre_tanh: Vec::with_capacity(n),
        action: Vec::with_capacity(n),
        log_prob: 0.0,
        clamped: Vec::with_capacity(n),
        half_width: Vec::with_capacity(n),
    };
    for i in 0..n {
        let raw = log_std[i];
        let ls = raw.clamp(LOG_STD_MIN, LOG_STD_MAX);
        let u = mean[i] + ls.exp() * noise[i];
        let half = 0.5 * (high[i] - low[i]);
        let a = low[i] + (u.tanh() + 1.0) * half;
        out.log_prob +=
            -0.5 * noise[i] * noise[i] - ls - HALF_LN_2PI - log_one_minus_tanh_sq(u) - half.ln();
        out.log_std.push(ls);
        out.pre_tanh.push(u);
        out.action.push(interior(a, low[i], high[i]));
        out.clamped.push(raw != ls);
        out.half_width.push(half);
    }
    Ok(out)
}

/// Keeps an action strictly inside `(low, high)` when tanh saturates in
/// floating point.
fn interior(a: f64, low: f64, high: f64) -> f64 {
    if a <= low {
        low.next_up()
    } else if a >= high {
        high.next_down()
    } else {
        a
    }
}

/// The deterministic (mean) action: `squash(mean)`.
pub fn squashed_mean(mean: &[f64], low: &[f64], high: &[f64]) -> Vec<f64> {
    mean.iter()
        .zip(low.iter().zip(high))
        .map(|(m, (l, h))| interior(l + (m.tanh() + 1.0) * 0.5 * (h - l), *l, *h))
        .collect()
}

/// Log-density of an arbitrary in-box action under the squashed Gaussian.
pub fn squashed_log_prob(
    mean: &[f64],
    log_std: &[f64],
    low: &[f64],
    high: &[f64],
    action: &[f64],
) -> Result<f64> {
    check_bounds(low, high)?;
    check_dim("action", low.len(), action.len())?;
    let mut lp = 0.0;
    for i in 0..action.len() {
        let half = 0.5 * (high[i] - low[i]);
        let y = (action[i] - low[i]) / half - 1.0;
        if !(y > -1.0 && y < 1.0) {
            return Ok(f64::NEG_INFINITY);
        }
        let u = y.atanh();
        let ls = log_std[i].clamp(LOG_STD_MIN, LOG_STD_MAX);
        let eps = (u - mean[i]) / ls.exp();
        lp += -0.5 * eps * eps - ls - HALF_LN_2PI - log_one_minus_tanh_sq(u) - half.ln();
    }
    Ok(lp)
}

impl SquashedGaussianOutput {
    /// Chain rule from `(dL/d action, dL/d log_prob)` back to the raw head
    /// outputs `(dL/d mean, dL/d log_std)`, noise held fixed.
    pub fn backprop(&self, grad_action: &[f64], grad_log_prob: f64) -> (Vec<f64>, Vec<f64>) {
        let n = self.mean.len();
        let mut d_mean = Vec::with_capacity(n);
        let mut d_log_std = Vec::with_capacity(n);
        for i in 0..n {
            let t = self.pre_tanh[i].tanh();
            let d_u = grad_action[i] * self.half_width[i] * (1.0 - t * t) + grad_log_prob * 2.0 * t;
            d_mean.push(d_u);
            if self.clamped[i] {
                d_log_std.push(0.0);
            } else {
                let std = self.log_std[i].exp();
                d_log_std.push(d_u * std * self.noise[i] - grad_log_prob);
            }
        }
        (d_mean, d_log_std)
    }
}

/// Samples every row of a batched policy head laid out as
/// `[mean(n), log_std(n)]` per row.
pub fn sample_head_batch(
    head: &[f64],
    batch: usize,
    low: &[f64],
    high: &[f64],
    noise: &[f64],
) -> Result<Vec<SquashedGaussianOutput>> {
    let n = low.len();
    check_dim("policy head", batch * 2 * n, head.len())?;
    check_dim("policy noise", batch * n, noise.len())?;
    head.chunks_exact(2 * n)
        .zip(noise.chunks_exact(n))
        .map(|(row, eps)| squashed_gaussian(&row[..n], &row[n..], low, high, eps))
        .collect()
}

/// Deterministic actions for every row of a batched head.
pub fn head_means(head: &[f64], low: &[f64], high: &[f64]) -> Vec<Vec<f64>> {
    let n = low.len();
    head.chunks_exact(2 * n)
        .map(|row| squashed_mean(&row[..n], low, high))
        .collect()
}

/// Gradient with respect to the batched head given per-row action gradients
/// (`batch x n`) and per-row log-probability weights.
pub fn head_gradients(
    samples: &[SquashedGaussianOutput],
    grad_actions: &[f64],
    grad_log_prob: &[f64],
) -> Vec<f64> {
    let n = samples.first().map_or(0, |s| s.mean.len());
    let mut out = Vec::with_capacity(samples.len() * 2 * n);
    for ((s, ga), gl) in samples
        .iter()
        .zip(grad_actions.chunks_exact(n))
        .zip(grad_log_prob)
    {
        let (dm, ds) = s.backprop(ga, *gl);
        out.extend_from_slice(&dm);
        out.extend_from_slice(&ds);
    }
    out
}
