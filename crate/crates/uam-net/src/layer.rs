use serde::{Deserialize, Serialize};

use crate::error::NetError;
use crate::linalg::{axpy, linear_forward, transpose};

/// One dense layer: `y = W·x + b`, weights stored row-major `[out × in]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    pub in_dim: usize,
    pub out_dim: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl DenseLayer {
    pub fn zeros(in_dim: usize, out_dim: usize) -> Self {
        DenseLayer {
            in_dim,
            out_dim,
            weights: vec![0.0; in_dim * out_dim],
            biases: vec![0.0; out_dim],
        }
    }

    pub fn param_count(&self) -> usize {
        self.weights.len() + self.biases.len()
    }

    /// Forward one batch: `x` is row-major `[rows × in_dim]`.
    pub fn forward_batch(&self, x: &[f64], rows: usize) -> Vec<f64> {
        linear_forward(x, rows, &self.weights, &self.biases, self.in_dim, self.out_dim)
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>, NetError> {
        if x.len() != self.in_dim {
            return Err(NetError::shape(format!(
                "dense layer expects input of length {}, got {}",
                self.in_dim,
                x.len()
            )));
        }
        Ok(self.forward_batch(x, 1))
    }

    /// Gradient with respect to the input: `dX = dY · W`, computed as a
    /// dot-product pass against the transposed weights.
    pub fn backward_input(&self, dy: &[f64], rows: usize) -> Vec<f64> {
        debug_assert_eq!(dy.len(), rows * self.out_dim);
        let w_t = transpose(&self.weights, self.out_dim, self.in_dim);
        let zero_bias = vec![0.0; self.in_dim];
        linear_forward(dy, rows, &w_t, &zero_bias, self.out_dim, self.in_dim)
    }

    /// Accumulate parameter gradients into `(dw, db)`:
    /// `dW[o] += Σ_r dY[r,o]·X[r]`, `db[o] += Σ_r dY[r,o]`.
    pub fn accumulate_param_grads(
        &self,
        x: &[f64],
        dy: &[f64],
        rows: usize,
        dw: &mut [f64],
        db: &mut [f64],
    ) {
        debug_assert_eq!(dw.len(), self.weights.len());
        debug_assert_eq!(db.len(), self.biases.len());
        for r in 0..rows {
            let xr = &x[r * self.in_dim..(r + 1) * self.in_dim];
            let dyr = &dy[r * self.out_dim..(r + 1) * self.out_dim];
            for (o, g) in dyr.iter().enumerate() {
                axpy(*g, xr, &mut dw[o * self.in_dim..(o + 1) * self.in_dim]);
                db[o] += *g;
            }
        }
    }
}

/// ReLU applied in place; returns the pre-activation copy for the cache.
pub fn relu_in_place(z: &mut [f64]) {
    for v in z.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
}

/// Backward through ReLU: zero the gradient where the pre-activation was
/// non-positive.
pub fn relu_backward(dz: &mut [f64], pre_activation: &[f64]) {
    debug_assert_eq!(dz.len(), pre_activation.len());
    for (g, z) in dz.iter_mut().zip(pre_activation) {
        if *z <= 0.0 {
            *g = 0.0;
        }
    }
}

/// Check a freshly computed activation buffer for numeric faults.
pub fn check_finite(layer: usize, values: &[f64]) -> Result<(), NetError> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(NetError::NumericFault {
            layer,
            what: "non-finite activation".to_string(),
        });
    }
    Ok(())
}
