//! Structural properties of the policy networks.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uam_net::{CommNetPolicy, DnnPolicy};

#[test]
fn commnet_is_equivariant_under_agent_permutation() {
    let m = 4;
    let obs_dim = 9;
    let actions = 7;
    let policy = CommNetPolicy::new(m, obs_dim, 16, 3, actions, 77).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let obs: Vec<f64> = (0..m * obs_dim).map(|_| rng.gen_range(-1.0..1.0)).collect();

    let base = policy.forward(&obs).unwrap();

    // A few fixed permutations including a full reversal and a 3-cycle.
    for sigma in [[1usize, 0, 2, 3], [3, 2, 1, 0], [1, 2, 0, 3], [2, 3, 0, 1]] {
        let mut permuted_obs = vec![0.0; obs.len()];
        for (new_pos, old) in sigma.iter().enumerate() {
            permuted_obs[new_pos * obs_dim..(new_pos + 1) * obs_dim]
                .copy_from_slice(&obs[old * obs_dim..(old + 1) * obs_dim]);
        }
        let permuted_out = policy.forward(&permuted_obs).unwrap();
        for (new_pos, old) in sigma.iter().enumerate() {
            for a in 0..actions {
                let diff = (permuted_out[new_pos * actions + a] - base[old * actions + a]).abs();
                assert!(
                    diff <= 1e-9,
                    "permutation {sigma:?}, agent {old}->{new_pos}, action {a}: diff {diff}"
                );
            }
        }
    }
}

#[test]
fn forward_is_deterministic() {
    let policy = CommNetPolicy::new(4, 46, 64, 6, 7, 1234).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let obs: Vec<f64> = (0..4 * 46).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let a = policy.forward(&obs).unwrap();
    let b = policy.forward(&obs).unwrap();
    assert_eq!(a, b);
}

#[test]
fn dnn_agent_is_insensitive_to_other_observations() {
    // The baseline network sees a single observation by construction; this
    // pins the input arity so no accidental coupling can appear.
    let net = DnnPolicy::new(10, 8, 2, 7, 3);
    let obs = [0.1; 10];
    let p = net.forward(&obs).unwrap();
    assert_eq!(p.len(), 7);
}

proptest! {
    /// Softmax outputs are distributions for arbitrary finite observations.
    #[test]
    fn commnet_outputs_are_distributions(values in proptest::collection::vec(-100.0f64..100.0, 3 * 5)) {
        let policy = CommNetPolicy::new(3, 5, 8, 2, 7, 55).unwrap();
        let probs = policy.forward(&values).unwrap();
        for agent in 0..3 {
            let row = &probs[agent * 7..(agent + 1) * 7];
            let sum: f64 = row.iter().sum();
            prop_assert!((sum - 1.0).abs() <= 1e-9);
            prop_assert!(row.iter().all(|p| *p >= 0.0 && p.is_finite()));
        }
    }
}
