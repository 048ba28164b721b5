use cusp_core::autodiff::{gradcheck, squashed_gaussian, squashed_log_prob, Mlp};
use cusp_core::rng::{Stream, StreamRng};
use proptest::prelude::*;

fn random_net(rng: &mut StreamRng) -> (Mlp, Vec<f64>, usize, Vec<f64>) {
    let depth = 1 + rng.index(3);
    let mut dims = vec![1 + rng.index(6)];
    for _ in 0..depth {
        dims.push(1 + rng.index(8));
    }
    dims.push(1 + rng.index(3));
    let net = Mlp::new(&dims, rng).unwrap();
    let batch = 1 + rng.index(4);
    let input = (0..batch * dims[0])
        .map(|_| rng.uniform(-2.0, 2.0))
        .collect();
    let weights = (0..batch * net.output_dim())
        .map(|_| rng.normal())
        .collect();
    (net, input, batch, weights)
}

#[test]
fn fifty_random_nets_match_finite_differences() {
    let mut rng = StreamRng::new(2024, Stream::Init);
    for k in 0..50 {
        let (net, input, batch, weights) = random_net(&mut rng);
        let check = gradcheck(&net, &input, batch, &weights, 1e-5).unwrap();
        assert!(
            check.max_error() < 1e-4,
            "net {k} {:?}: relative error {:e}",
            net.dims(),
            check.max_error()
        );
    }
}

// Hand-worked 2-4-1 chain: x = (1, 2), one ReLU unit off.
#[test]
fn two_four_one_chain_by_hand() {
    let mut net = Mlp::zeros(&[2, 4, 1]).unwrap();
    net.weights_mut(0)
        .copy_from_slice(&[1.0, 0.0, 0.0, 1.0, 1.0, 1.0, -1.0, 0.5]);
    net.bias_mut(0).copy_from_slice(&[0.0, 0.5, 0.1, -1.2]);
    net.weights_mut(1).copy_from_slice(&[0.5, -1.0, 2.0, 3.0]);
    net.bias_mut(1).copy_from_slice(&[0.25]);

    // pre = (1, 2.5, 3.1, -1.2) -> h = (1, 2.5, 3.1, 0)
    let (y, tape) = net.forward_batch(&[1.0, 2.0], 1).unwrap();
    assert!((y[0] - 4.45).abs() < 1e-12);

    let g = net.backward(&tape, &[1.0]).unwrap();
    let expected_w0 = [0.5, 1.0, -1.0, -2.0, 2.0, 4.0, 0.0, 0.0];
    let expected_b0 = [0.5, -1.0, 2.0, 0.0];
    let expected_w1 = [1.0, 2.5, 3.1, 0.0];
    let expected: Vec<f64> = expected_w0
        .iter()
        .chain(&expected_b0)
        .chain(&expected_w1)
        .chain(&[1.0])
        .copied()
        .collect();
    for (a, e) in g.params.iter().zip(&expected) {
        assert!((a - e).abs() < 1e-12, "{:?} vs {expected:?}", g.params);
    }
    assert!((g.input[0] - 2.5).abs() < 1e-12);
    assert!((g.input[1] - 1.0).abs() < 1e-12);
}

#[test]
fn squashed_density_integrates_to_one() {
    let (mean, log_std, low, high) = ([0.3], [-0.5], [-2.0], [1.0]);
    let mut rng = StreamRng::new(7, Stream::Init);
    let n = 1_000_000;
    let width = high[0] - low[0];
    let mut sum = 0.0;
    for _ in 0..n {
        let a = rng.uniform(low[0], high[0]);
        sum += squashed_log_prob(&mean, &log_std, &low, &high, &[a])
            .unwrap()
            .exp();
    }
    let mass = width * sum / n as f64;
    assert!((mass - 1.0).abs() < 0.02, "mass {mass}");
}

#[test]
fn two_dimensional_density_integrates_to_one() {
    let (mean, log_std, low, high) = ([-0.2, 0.5], [0.1, -1.0], [0.0, -0.5], [0.5, 0.5]);
    let steps = 800;
    let (dx, dy) = (
        (high[0] - low[0]) / steps as f64,
        (high[1] - low[1]) / steps as f64,
    );
    let mut mass = 0.0;
    for i in 0..steps {
        for j in 0..steps {
            let a = [
                low[0] + (i as f64 + 0.5) * dx,
                low[1] + (j as f64 + 0.5) * dy,
            ];
            mass += squashed_log_prob(&mean, &log_std, &low, &high, &a)
                .unwrap()
                .exp()
                * dx
                * dy;
        }
    }
    assert!((mass - 1.0).abs() < 0.02, "mass {mass}");
}

proptest! {
    #[test]
    fn sample_log_prob_agrees_with_density(
        mean in -3.0f64..3.0,
        log_std in -3.0f64..1.5,
        noise in -3.0f64..3.0,
        low in -2.0f64..0.0,
        width in 0.1f64..3.0,
    ) {
        let high = low + width;
        let s = squashed_gaussian(&[mean], &[log_std], &[low], &[high], &[noise]).unwrap();
        prop_assert!(s.action[0] > low && s.action[0] < high);
        let lp = squashed_log_prob(&[mean], &[log_std], &[low], &[high], &s.action).unwrap();
        // Saturated tanh loses precision in the inverse map.
        if s.pre_tanh[0].abs() < 5.0 {
            prop_assert!((lp - s.log_prob).abs() < 1e-6 * (1.0 + lp.abs()));
        }
    }
}
