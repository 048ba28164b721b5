//! Central finite-difference checks for [`Mlp::backward`].

use super::mlp::Mlp;
use crate::error::{check_dim, Result};

/// Worst disagreement between analytic and numeric gradients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheck {
    pub max_param_error: f64,
    pub max_input_error: f64,
    pub checked: usize,
}

impl GradCheck {
    pub fn max_error(&self) -> f64 {
        self.max_param_error.max(self.max_input_error)
    }
}

/// `|a - b| / max(|a|, |b|, floor)`. The floor keeps entries that are zero
/// in both from reporting noise as error.
pub fn relative_error(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

/// Compares the gradient of `sum(weights . net(input))` with respect to every
/// parameter and input against central differences with step `h`.
pub fn gradcheck(
    net: &Mlp,
    input: &[f64],
    batch: usize,
    weights: &[f64],
    h: f64,
) -> Result<GradCheck> {
    check_dim("gradcheck weights", batch * net.output_dim(), weights.len())?;
    let objective = |net: &Mlp, x: &[f64]| -> Result<f64> {
        let y = net.predict_batch(x, batch)?;
        Ok(y.iter().zip(weights).map(|(a, b)| a * b).sum())
    };
    let (_, tape) = net.forward_batch(input, batch)?;
    let analytic = net.backward(&tape, weights)?;
    let floor = 1e-6;

    let mut probe = net.clone();
    let mut max_param_error: f64 = 0.0;
    for i in 0..net.num_params() {
        let orig = probe.params()[i];
        probe.params_mut()[i] = orig + h;
        let up = objective(&probe, input)?;
        probe.params_mut()[i] = orig - h;
        let down = objective(&probe, input)?;
        probe.params_mut()[i] = orig;
        let numeric = (up - down) / (2.0 * h);
        max_param_error = max_param_error.max(relative_error(analytic.params[i], numeric, floor));
    }

    let mut x = input.to_vec();
    let mut max_input_error: f64 = 0.0;
    for i in 0..x.len() {
        let orig = x[i];
        x[i] = orig + h;
        let up = objective(net, &x)?;
        x[i] = orig - h;
        let down = objective(net, &x)?;
        x[i] = orig;
        let numeric = (up - down) / (2.0 * h);
        max_input_error = max_input_error.max(relative_error(analytic.input[i], numeric, floor));
    }
    Ok(GradCheck {
        max_param_error,
        max_input_error,
        checked: net.num_params() + input.len(),
    })
}
