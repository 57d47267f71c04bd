use serde::{Deserialize, Serialize};

use crate::error::NetError;
use crate::init::init_dense_params;
use crate::layer::{check_finite, relu_backward, relu_in_place, DenseLayer};
use crate::softmax::softmax_rows;

/// Per-agent dense stack with no communication. The raw outputs double as
/// Q-values for the independent-learning baseline; [`DnnPolicy::forward`]
/// applies a softmax for the policy view.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DnnPolicy {
    pub obs_dim: usize,
    pub hidden_dim: usize,
    pub action_dim: usize,
    /// Hidden rectified layers followed by the linear output head.
    pub layers: Vec<DenseLayer>,
}

/// Cached intermediates of one batched forward pass.
pub struct DnnCache {
    rows: usize,
    input: Vec<f64>,
    /// Pre-activations of the hidden layers.
    z: Vec<Vec<f64>>,
    /// Rectified hidden activations.
    h: Vec<Vec<f64>>,
}

impl DnnCache {
    /// Smallest |pre-activation| seen in this forward pass.
    pub fn min_abs_pre_activation(&self) -> f64 {
        self.z
            .iter()
            .flatten()
            .fold(f64::INFINITY, |acc, z| acc.min(z.abs()))
    }
}

impl DnnPolicy {
    pub fn new(
        obs_dim: usize,
        hidden_dim: usize,
        num_hidden: usize,
        action_dim: usize,
        seed: u64,
    ) -> Self {
        let mut layers = Vec::with_capacity(num_hidden + 1);
        let mut in_dim = obs_dim;
        for l in 0..num_hidden {
            layers.push(init_dense_params(in_dim, hidden_dim, seed, l as u64));
            in_dim = hidden_dim;
        }
        layers.push(init_dense_params(in_dim, action_dim, seed, num_hidden as u64));
        DnnPolicy {
            obs_dim,
            hidden_dim,
            action_dim,
            layers,
        }
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

    /// Action distribution for one observation.
    pub fn forward(&self, obs: &[f64]) -> Result<Vec<f64>, NetError> {
        let logits = self.forward_logits(obs)?;
        Ok(softmax_rows(&logits, 1, self.action_dim))
    }

    /// Raw outputs (logits / Q-values) for one observation.
    pub fn forward_logits(&self, obs: &[f64]) -> Result<Vec<f64>, NetError> {
        if obs.len() != self.obs_dim {
            return Err(NetError::shape(format!(
                "expected observation of length {}, got {}",
                self.obs_dim,
                obs.len()
            )));
        }
        let (out, _) = self.forward_batch_cached(obs, 1)?;
        Ok(out)
    }

    /// Batched forward with cache; `obs` is row-major `[rows × obs_dim]`.
    pub fn forward_batch_cached(
        &self,
        obs: &[f64],
        rows: usize,
    ) -> Result<(Vec<f64>, DnnCache), NetError> {
        if obs.len() != rows * self.obs_dim {
            return Err(NetError::shape(format!(
                "expected {} observation values, got {}",
                rows * self.obs_dim,
                obs.len()
            )));
        }
        let hidden_count = self.layers.len() - 1;
        let mut z = Vec::with_capacity(hidden_count);
        let mut h = Vec::with_capacity(hidden_count);
        let mut current = obs;
        let mut owned;
        for (l, layer) in self.layers[..hidden_count].iter().enumerate() {
            let pre = layer.forward_batch(current, rows);
            check_finite(l, &pre)?;
            let mut act = pre.clone();
            relu_in_place(&mut act);
            z.push(pre);
            h.push(act);
            owned = h.last().unwrap();
            current = owned;
        }
        let out = self.layers[hidden_count].forward_batch(current, rows);
        check_finite(hidden_count, &out)?;
        Ok((
            out,
            DnnCache {
                rows,
                input: obs.to_vec(),
                z,
                h,
            },
        ))
    }

    /// Backward from output gradients; returns flattened parameter gradients
    /// aligned with [`DnnPolicy::params_flat`].
    pub fn backward_batch(&self, cache: &DnnCache, dout: &[f64]) -> Result<Vec<f64>, NetError> {
        let rows = cache.rows;
        if dout.len() != rows * self.action_dim {
            return Err(NetError::shape(format!(
                "expected {} output gradients, got {}",
                rows * self.action_dim,
                dout.len()
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
            self.layers[hidden_count].accumulate_param_grads(head_in, dout, rows, dw, db);
        }
        let mut dh = self.layers[hidden_count].backward_input(dout, rows);

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
