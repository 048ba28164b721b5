//! Multilayer perceptrons with a recorded forward pass and reverse-mode
//! gradients.
//!
//! All parameters of a network live in one flat buffer. Layer `i` owns a
//! row-major weight block of shape `dims[i+1] x dims[i]` followed by a bias
//! block of length `dims[i+1]`. Gradients share that layout, so optimizers,
//! target-network averaging and checkpointing work on plain slices.
//!
//! Batched activations are row-major `batch x features`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Identity,
}

impl Activation {
    fn apply(self, xs: &mut [f64]) {
        if self == Activation::Relu {
            for x in xs {
                if *x < 0.0 {
                    *x = 0.0;
                }
            }
        }
    }

    fn name(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Identity => "identity",
        }
    }

    pub(crate) fn parse(s: &str) -> Option<Self> {
        match s {
            "relu" => Some(Activation::Relu),
            "identity" => Some(Activation::Identity),
            _ => None,
        }
    }
}

impl std::fmt::Display for Activation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// `C = A * B + beta * C` on strided row/column layouts.
#[allow(clippy::too_many_arguments)]
fn gemm(
    m: usize,
    k: usize,
    n: usize,
    a: &[f64],
    a_strides: (usize, usize),
    b: &[f64],
    b_strides: (usize, usize),
    beta: f64,
    c: &mut [f64],
) {
    debug_assert!(m == 0 || k == 0 || (m - 1) * a_strides.0 + (k - 1) * a_strides.1 < a.len());
    debug_assert!(k == 0 || n == 0 || (k - 1) * b_strides.0 + (n - 1) * b_strides.1 < b.len());
    assert!(c.len() >= m * n);
    // SAFETY: the asserts above bound every strided access inside the slices.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            a_strides.0 as isize,
            a_strides.1 as isize,
            b.as_ptr(),
            b_strides.0 as isize,
            b_strides.1 as isize,
            beta,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

/// Fully connected network: rectifier on hidden layers, linear output.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    dims: Vec<usize>,
    hidden: Activation,
    params: Vec<f64>,
    offsets: Vec<usize>,
}

/// Activations recorded by a batched forward pass.
#[derive(Debug, Clone, Default)]
pub struct Tape {
    batch: usize,
    /// `acts[i]` is the input to layer `i` (post-activation of layer `i-1`).
    acts: Vec<Vec<f64>>,
}

impl Tape {
    pub fn is_recorded(&self) -> bool {
        !self.acts.is_empty()
    }

    pub fn batch(&self) -> usize {
        self.batch
    }
}

/// Result of a backward pass.
#[derive(Debug, Clone)]
pub struct Gradients {
    /// Same layout as [`Mlp::params`].
    pub params: Vec<f64>,
    /// Gradient with respect to the batched input, `batch x dims[0]`.
    pub input: Vec<f64>,
}

fn layer_offsets(dims: &[usize]) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(dims.len());
    let mut at = 0;
    for w in dims.windows(2) {
        offsets.push(at);
        at += w[0] * w[1] + w[1];
    }
    offsets.push(at);
    offsets
}

impl Mlp {
    /// A network with every parameter zero.
    pub fn zeros(dims: &[usize]) -> Result<Self> {
        if dims.len() < 2 || dims.contains(&0) {
            return Err(Error::Config(format!(
                "layer dims must have at least two positive entries, got {dims:?}"
            )));
        }
        let offsets = layer_offsets(dims);
        let total = *offsets.last().unwrap();
        Ok(Self {
            dims: dims.to_vec(),
            hidden: Activation::Relu,
            params: vec![0.0; total],
            offsets,
        })
    }

    /// Uniform fan-in initialization `U(-1/sqrt(fan_in), 1/sqrt(fan_in))`
    /// for weights and biases.
    pub fn new<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<Self> {
        let mut net = Self::zeros(dims)?;
        for layer in 0..net.num_layers() {
            let bound = 1.0 / (net.dims[layer] as f64).sqrt();
            let (start, end) = (net.offsets[layer], net.offsets[layer + 1]);
            for p in &mut net.params[start..end] {
                *p = rng.random_range(-bound..bound);
            }
        }
        Ok(net)
    }

    pub(crate) fn from_parts(
        dims: Vec<usize>,
        hidden: Activation,
        params: Vec<f64>,
    ) -> Result<Self> {
        let mut net = Self::zeros(&dims)?;
        check_dim("mlp parameters", net.params.len(), params.len())?;
        net.hidden = hidden;
        net.params = params;
        Ok(net)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn hidden_activation(&self) -> Activation {
        self.hidden
    }

    pub fn input_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.dims.last().unwrap()
    }

    pub fn num_layers(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    /// Weight block of `layer`, row-major `dims[layer+1] x dims[layer]`.
    pub fn weights(&self, layer: usize) -> &[f64] {
        let start = self.offsets[layer];
        &self.params[start..start + self.dims[layer] * self.dims[layer + 1]]
    }

    pub fn weights_mut(&mut self, layer: usize) -> &mut [f64] {
        let start = self.offsets[layer];
        let len = self.dims[layer] * self.dims[layer + 1];
        &mut self.params[start..start + len]
    }

    pub fn bias(&self, layer: usize) -> &[f64] {
        let start = self.offsets[layer] + self.dims[layer] * self.dims[layer + 1];
        &self.params[start..self.offsets[layer + 1]]
    }

    pub fn bias_mut(&mut self, layer: usize) -> &mut [f64] {
        let start = self.offsets[layer] + self.dims[layer] * self.dims[layer + 1];
        let end = self.offsets[layer + 1];
        &mut self.params[start..end]
    }

    /// Polyak averaging: `self = (1 - tau) * self + tau * online`.
    pub fn soft_update_from(&mut self, online: &Mlp, tau: f64) {
        assert_eq!(
            self.dims, online.dims,
            "soft update between different shapes"
        );
        if tau >= 1.0 {
            self.params.copy_from_slice(&online.params);
            return;
        }
        for (t, o) in self.params.iter_mut().zip(&online.params) {
            *t += tau * (o - *t);
        }
    }

    /// Single-input forward pass.
    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        check_dim("mlp input", self.input_dim(), input.len())?;
        Ok(self.forward_batch(input, 1)?.0)
    }

    /// Batched forward pass returning the output and the recorded tape.
    pub fn forward_batch(&self, input: &[f64], batch: usize) -> Result<(Vec<f64>, Tape)> {
        check_dim("mlp batched input", batch * self.input_dim(), input.len())?;
        let mut acts = Vec::with_capacity(self.num_layers());
        let mut x = input.to_vec();
        for layer in 0..self.num_layers() {
            let (n_in, n_out) = (self.dims[layer], self.dims[layer + 1]);
            let mut z = Vec::with_capacity(batch * n_out);
            for _ in 0..batch {
                z.extend_from_slice(self.bias(layer));
            }
            gemm(
                batch,
                n_in,
                n_out,
                &x,
                (n_in, 1),
                self.weights(layer),
                (1, n_in),
                1.0,
                &mut z,
            );
            if layer + 1 < self.num_layers() {
                self.hidden.apply(&mut z);
            }
            acts.push(std::mem::replace(&mut x, z));
        }
        Ok((x, Tape { batch, acts }))
    }

    /// Output-only batched forward pass.
    pub fn predict_batch(&self, input: &[f64], batch: usize) -> Result<Vec<f64>> {
        Ok(self.forward_batch(input, batch)?.0)
    }

    /// Reverse pass: gradients of `sum(grad_output . output)` with respect to
    /// every parameter and to the input.
    pub fn backward(&self, tape: &Tape, grad_output: &[f64]) -> Result<Gradients> {
        if !tape.is_recorded() {
            return Err(Error::State(
                "backward called without a recorded forward pass".into(),
            ));
        }
        check_dim("tape layers", self.num_layers(), tape.acts.len())?;
        let batch = tape.batch;
        check_dim(
            "output gradient",
            batch * self.output_dim(),
            grad_output.len(),
        )?;

        let mut grads = vec![0.0; self.params.len()];
        let mut delta = grad_output.to_vec();
        for layer in (0..self.num_layers()).rev() {
            let (n_in, n_out) = (self.dims[layer], self.dims[layer + 1]);
            let x = &tape.acts[layer];
            check_dim("tape activation", batch * n_in, x.len())?;

            let w_start = self.offsets[layer];
            let b_start = w_start + n_in * n_out;
            // dW = delta^T x
            gemm(
                n_out,
                batch,
                n_in,
                &delta,
                (1, n_out),
                x,
                (n_in, 1),
                0.0,
                &mut grads[w_start..b_start],
            );
            let db = &mut grads[b_start..b_start + n_out];
            for row in delta.chunks_exact(n_out) {
                for (g, d) in db.iter_mut().zip(row) {
                    *g += d;
                }
            }

            // dx = delta W
            let mut dx = vec![0.0; batch * n_in];
            gemm(
                batch,
                n_out,
                n_in,
                &delta,
                (n_out, 1),
                self.weights(layer),
                (n_in, 1),
                0.0,
                &mut dx,
            );
            if layer > 0 && self.hidden == Activation::Relu {
                for (g, a) in dx.iter_mut().zip(x) {
                    if *a <= 0.0 {
                        *g = 0.0;
                    }
                }
            }
            delta = dx;
        }
        Ok(Gradients {
            params: grads,
            input: delta,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_layer_passes_input_through() {
        let mut net = Mlp::zeros(&[2, 2]).unwrap();
        net.weights_mut(0).copy_from_slice(&[1.0, 0.0, 0.0, 1.0]);
        assert_eq!(net.forward(&[1.0, 2.0]).unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn zero_weights_return_bias() {
        let mut net = Mlp::zeros(&[3, 2]).unwrap();
        net.bias_mut(0).copy_from_slice(&[0.5, -1.5]);
        assert_eq!(net.forward(&[9.0, -4.0, 2.0]).unwrap(), vec![0.5, -1.5]);
    }

    #[test]
    fn wrong_input_length_is_a_dimension_error() {
        let net = Mlp::zeros(&[3, 2]).unwrap();
        assert!(matches!(net.forward(&[1.0]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn backward_without_forward_is_a_state_error() {
        let net = Mlp::zeros(&[2, 1]).unwrap();
        let err = net.backward(&Tape::default(), &[1.0]).unwrap_err();
        assert!(matches!(err, Error::State(_)));
    }

    #[test]
    fn linear_derivative_is_the_input() {
        // y = w * x at x = 2
        let mut net = Mlp::zeros(&[1, 1]).unwrap();
        net.weights_mut(0)[0] = 0.7;
        let (_, tape) = net.forward_batch(&[2.0], 1).unwrap();
        let g = net.backward(&tape, &[1.0]).unwrap();
        assert_eq!(g.params[0], 2.0);
        assert_eq!(g.params[1], 1.0);
        assert_eq!(g.input, vec![0.7]);
    }

    #[test]
    fn zero_upstream_gradient_gives_zero_gradients() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let net = Mlp::new(&[3, 8, 2], &mut rng).unwrap();
        let (_, tape) = net.forward_batch(&[0.1, 0.2, 0.3], 1).unwrap();
        let g = net.backward(&tape, &[0.0, 0.0]).unwrap();
        assert!(g.params.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn batched_forward_matches_row_by_row() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let net = Mlp::new(&[3, 5, 4, 2], &mut rng).unwrap();
        let xs = [0.1, -0.4, 0.9, 1.2, 0.0, -0.3, -2.0, 0.5, 0.25];
        let batched = net.predict_batch(&xs, 3).unwrap();
        for (row, out) in xs.chunks(3).zip(batched.chunks(2)) {
            assert_eq!(net.forward(row).unwrap(), out);
        }
    }

    #[test]
    fn soft_update_with_unit_tau_copies() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let online = Mlp::new(&[2, 4, 1], &mut rng).unwrap();
        let mut target = Mlp::new(&[2, 4, 1], &mut rng).unwrap();
        target.soft_update_from(&online, 1.0);
        assert_eq!(target, online);
    }
}
