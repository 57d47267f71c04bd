use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::layer::DenseLayer;

/// Fan-based uniform initialization: weights drawn from
/// `U(−√(6/(fan_in+fan_out)), +√(6/(fan_in+fan_out)))`, biases zero.
/// Deterministic in `(seed, layer_index)`.
pub fn init_dense_params(in_dim: usize, out_dim: usize, seed: u64, layer_index: u64) -> DenseLayer {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(layer_index);
    let bound = (6.0 / (in_dim + out_dim) as f64).sqrt();
    let weights = (0..in_dim * out_dim)
        .map(|_| rng.gen_range(-bound..=bound))
        .collect();
    DenseLayer {
        in_dim,
        out_dim,
        weights,
        biases: vec![0.0; out_dim],
    }
}
