use dqv::nn::{gradcheck, Gradients, Mlp, Optimizer, OptimizerConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Textbook forward pass: explicit loops over the row-major weight matrices.
fn naive_forward(net: &Mlp, input: &[f64]) -> Vec<f64> {
    let sizes = net.layer_sizes();
    let mut x = input.to_vec();
    for k in 0..net.num_layers() {
        let (fan_in, fan_out) = (sizes[k], sizes[k + 1]);
        let w = net.weights(k);
        let b = net.biases(k);
        let mut y = vec![0.0; fan_out];
        for o in 0..fan_out {
            let mut acc = b[o];
            for i in 0..fan_in {
                acc += w[o * fan_in + i] * x[i];
            }
            y[o] = if k + 1 < net.num_layers() { acc.max(0.0) } else { acc };
        }
        x = y;
    }
    x
}

fn network_and_input() -> impl Strategy<Value = (Vec<usize>, u64, Vec<f64>)> {
    (prop::collection::vec(1usize..12, 2..5), any::<u64>()).prop_flat_map(|(sizes, seed)| {
        let n = sizes[0];
        (
            Just(sizes),
            Just(seed),
            prop::collection::vec(-3.0f64..3.0, n),
        )
    })
}

proptest! {
    #[test]
    fn forward_matches_naive_matmul((sizes, seed, input) in network_and_input()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = Mlp::new(&sizes, &mut rng).unwrap();
        let fast = net.forward(&input).unwrap();
        let slow = naive_forward(&net, &input);
        prop_assert_eq!(fast.len(), slow.len());
        for (a, b) in fast.iter().zip(&slow) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()), "{} vs {}", a, b);
        }
    }

    #[test]
    fn masked_loss_ignores_unselected_targets(seed in any::<u64>(), junk in -50.0f64..50.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = Mlp::new(&[3, 5, 3], &mut rng).unwrap();
        let x = [[0.1, -0.4, 0.9]];
        let (l1, g1) = net.mse_loss_and_gradients(&x, &[[0.0, 1.0, 0.0]], Some(&[1])).unwrap();
        let (l2, g2) = net.mse_loss_and_gradients(&x, &[[junk, 1.0, -junk]], Some(&[1])).unwrap();
        prop_assert_eq!(l1, l2);
        prop_assert_eq!(g1, g2);
    }

    #[test]
    fn sgd_step_moves_against_the_gradient(seed in any::<u64>(), lr in 1e-4f64..1e-1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut net = Mlp::new(&[2, 4, 1], &mut rng).unwrap();
        let before = net.clone();
        let (_, grads) = net.mse_loss_and_gradients(&[[0.5, -0.5]], &[[2.0]], None).unwrap();
        let mut opt = Optimizer::new(OptimizerConfig::sgd(lr), &net);
        opt.step(&mut net, &grads).unwrap();
        for k in 0..net.num_layers() {
            for (i, &w) in net.weights(k).iter().enumerate() {
                let expected = before.weights(k)[i] - lr * grads.weights[k][i];
                prop_assert!((w - expected).abs() < 1e-15);
            }
        }
    }
}

#[test]
fn finite_difference_suite_fifty_configurations() {
    let reports = gradcheck::run_suite(50, 0).unwrap();
    assert_eq!(reports.len(), 50);
    for (i, r) in reports.iter().enumerate() {
        assert!(r.compared > 0, "configuration {i} compared nothing");
        assert!(r.passed(), "configuration {i}: {r:?}");
    }
    assert!(reports.iter().any(|r| r.masked) && reports.iter().any(|r| !r.masked));
}

#[test]
fn zero_gradient_leaves_adam_parameters_alone() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut net = Mlp::new(&[2, 3, 2], &mut rng).unwrap();
    let before = net.clone();
    let mut opt = Optimizer::new(OptimizerConfig::adam(1e-3), &net);
    let zero = Gradients::zeros_like(&net);
    opt.step(&mut net, &zero).unwrap();
    assert_eq!(net, before);
    assert_eq!(opt.steps(), 1);
}

#[test]
fn checkpoint_round_trip_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let net = Mlp::new(&[4, 7, 2], &mut rng).unwrap();
    let text = serde_json::to_string(&net).unwrap();
    let back: Mlp = serde_json::from_str(&text).unwrap();
    assert_eq!(net, back);
}
