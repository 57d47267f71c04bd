use serde::{Deserialize, Serialize};

use crate::error::NetError;
use crate::init::init_dense_params;
use crate::layer::{check_finite, relu_backward, relu_in_place, DenseLayer};

/// Centralized action-value network: a rectified dense stack mapping the
/// concatenation of all observations and one-hot actions to a scalar Q.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticNet {
    pub in_dim: usize,
    /// Hidden rectified layers followed by the scalar linear head.
    pub layers: Vec<DenseLayer>,
}

/// Cached intermediates of one batched forward pass.
pub struct CriticCache {
    rows: usize,
    input: Vec<f64>,
    z: Vec<Vec<f64>>,
    h: Vec<Vec<f64>>,
}

impl CriticCache {
    /// Smallest |pre-activation| seen in this forward pass.
    pub fn min_abs_pre_activation(&self) -> f64 {
        self.z
            .iter()
            .flatten()
            .fold(f64::INFINITY, |acc, z| acc.min(z.abs()))
    }
}

impl CriticNet {
    /// `widths` are the hidden layer widths, e.g. `[64; 6]`.
    pub fn new(in_dim: usize, widths: &[usize], seed: u64) -> Self {
        let mut layers = Vec::with_capacity(widths.len() + 1);
        let mut prev = in_dim;
        for (l, w) in widths.iter().enumerate() {
            layers.push(init_dense_params(prev, *w, seed, l as u64));
            prev = *w;
        }
        layers.push(init_dense_params(prev, 1, seed, widths.len() as u64));
        CriticNet { in_dim, layers }
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.param_count()).sum()
    }

    pub fn shapes(&self) -> Vec<(usize, usize)> {
        self.layers.iter().map(|l| (l.out_dim, l.in_dim)).collect()
    }

    pub fn params_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for layer in &self.layers {
            out.extend_from_slice(&layer.weights);
            out.extend_from_slice(&layer.biases);
        }
        out
    }

    pub fn set_params_flat(&mut self, params: &[f64]) -> Result<(), NetError> {
        if params.len() != self.param_count() {
            return Err(NetError::shape(format!(
                "expected {} parameters, got {}",
                self.param_count(),
                params.len()
            )));
        }
        let mut offset = 0;
        for layer in &mut self.layers {
            let w = layer.weights.len();
            layer.weights.copy_from_slice(&params[offset..offset + w]);
            offset += w;
            let b = layer.biases.len();
            layer.biases.copy_from_slice(&params[offset..offset + b]);
            offset += b;
        }
        Ok(())
    }

    /// Scalar Q for one concatenated input.
    pub fn forward(&self, input: &[f64]) -> Result<f64, NetError> {
        if input.len() != self.in_dim {
            return Err(NetError::shape(format!(
                "critic expects input of length {}, got {}",
                self.in_dim,
                input.len()
            )));
        }
        let (q, _) = self.forward_batch_cached(input, 1)?;
        Ok(q[0])
    }

    /// Batched forward with cache; returns one Q per row.
    pub fn forward_batch_cached(
        &self,
        input: &[f64],
        rows: usize,
    ) -> Result<(Vec<f64>, CriticCache), NetError> {
        if input.len() != rows * self.in_dim {
            return Err(NetError::shape(format!(
                "expected {} input values, got {}",
                rows * self.in_dim,
                input.len()
            )));
        }
        let hidden_count = self.layers.len() - 1;
        let mut z = Vec::with_capacity(hidden_count);
        let mut h = Vec::with_capacity(hidden_count);
        let mut current = input;
        for (l, layer) in self.layers[..hidden_count].iter().enumerate() {
            let pre = layer.forward_batch(current, rows);
            check_finite(l, &pre)?;
            let mut act = pre.clone();
            relu_in_place(&mut act);
            z.push(pre);
            h.push(act);
            current = h.last().unwrap();
        }
        let out = self.layers[hidden_count].forward_batch(current, rows);
        check_finite(hidden_count, &out)?;
        Ok((
            out,
            CriticCache {
                rows,
                input: input.to_vec(),
                z,
                h,
            },
        ))
    }

    /// Backward from per-row scalar gradients; returns flattened parameter
    /// gradients aligned with [`CriticNet::params_flat`].
    pub fn backward_batch(&self, cache: &CriticCache, dq: &[f64]) -> Result<Vec<f64>, NetError> {
        let rows = cache.rows;
        if dq.len() != rows {
            return Err(NetError::shape(format!(
                "expected {rows} output gradients, got {}",
                dq.len()
            )));
        }
        let mut grads = vec![0.0; self.param_count()];
        let mut offsets = Vec::new();
        let mut acc = 0;
        for layer in &self.layers {
            let w = layer.weights.len();
            let b = layer.biases.len();
            offsets.push((acc, acc + w, acc + w + b));
            acc += w + b;
        }

        let hidden_count = self.layers.len() - 1;
        let head_in: &[f64] = if hidden_count == 0 {
            &cache.input
        } else {
            &cache.h[hidden_count - 1]
        };
        {
            let (w0, b0, end) = offsets[hidden_count];
            let (dw, db) = grads[w0..end].split_at_mut(b0 - w0);
            self.layers[hidden_count].accumulate_param_grads(head_in, dq, rows, dw, db);
        }
        let mut dh = self.layers[hidden_count].backward_input(dq, rows);

        for l in (0..hidden_count).rev() {
            let mut dz = dh;
            relu_backward(&mut dz, &cache.z[l]);
            let input: &[f64] = if l == 0 { &cache.input } else { &cache.h[l - 1] };
            {
                let (w0, b0, end) = offsets[l];
                let (dw, db) = grads[w0..end].split_at_mut(b0 - w0);
                self.layers[l].accumulate_param_grads(input, &dz, rows, dw, db);
            }
            dh = self.layers[l].backward_input(&dz, rows);
        }
        Ok(grads)
    }
}
