use serde::{Deserialize, Serialize};

use crate::error::NetError;
use crate::init::init_dense_params;
use crate::layer::{check_finite, relu_backward, relu_in_place, DenseLayer};
use crate::softmax::softmax_rows;

/// Mean of the other agents' hidden states for agent `m`.
///
/// `hidden` is row-major `[num_agents × hidden_dim]` for one sample. The sum
/// excludes agent `m` directly (no subtract-from-total shortcut), so for two
/// agents the result equals the other agent's hidden state bit-for-bit.
pub fn comm_mean(
    hidden: &[f64],
    num_agents: usize,
    hidden_dim: usize,
    m: usize,
) -> Result<Vec<f64>, NetError> {
    if num_agents < 2 {
        return Err(NetError::DegenerateFleet { agents: num_agents });
    }
    if hidden.len() != num_agents * hidden_dim || m >= num_agents {
        return Err(NetError::shape(format!(
            "comm_mean expects [{num_agents} x {hidden_dim}] hidden states and m < {num_agents}"
        )));
    }
    let mut c = vec![0.0; hidden_dim];
    for other in 0..num_agents {
        if other == m {
            continue;
        }
        let row = &hidden[other * hidden_dim..(other + 1) * hidden_dim];
        for (ci, hi) in c.iter_mut().zip(row) {
            *ci += hi;
        }
    }
    let scale = 1.0 / (num_agents as f64 - 1.0);
    for ci in c.iter_mut() {
        *ci *= scale;
    }
    Ok(c)
}

/// Communication-based multi-agent policy.
///
/// A rectified dense encoder lifts each agent's observation to a hidden
/// state; each of the `blocks` then consumes the concatenation of the
/// agent's own hidden state with the mean of the other agents' hidden
/// states. A shared head maps the final hidden state to one logit per
/// action. All parameters are shared across agents, which makes the
/// network equivariant under agent permutations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommNetPolicy {
    pub num_agents: usize,
    pub obs_dim: usize,
    pub hidden_dim: usize,
    pub action_dim: usize,
    pub encoder: DenseLayer,
    pub blocks: Vec<DenseLayer>,
    pub head: DenseLayer,
}

/// Cached intermediates of one batched forward pass.
pub struct CommNetCache {
    batch: usize,
    /// Input copy, `[batch*num_agents × obs_dim]`.
    input: Vec<f64>,
    /// Encoder pre-activation.
    z_enc: Vec<f64>,
    /// Hidden states h¹..h^{L+1}; `hidden[0]` is the rectified encoder output.
    hidden: Vec<Vec<f64>>,
    /// Per-block concatenated `[h | c]` inputs.
    concat: Vec<Vec<f64>>,
    /// Per-block pre-activations.
    z_blocks: Vec<Vec<f64>>,
}

impl CommNetCache {
    /// Smallest |pre-activation| seen in this forward pass. Near-zero values
    /// mean the pass grazed the rectifier kink, where finite-difference
    /// gradient checks are unreliable.
    pub fn min_abs_pre_activation(&self) -> f64 {
        self.z_enc
            .iter()
            .chain(self.z_blocks.iter().flatten())
            .fold(f64::INFINITY, |acc, z| acc.min(z.abs()))
    }
}

impl CommNetPolicy {
    pub fn new(
        num_agents: usize,
        obs_dim: usize,
        hidden_dim: usize,
        num_blocks: usize,
        action_dim: usize,
        seed: u64,
    ) -> Result<Self, NetError> {
        if num_agents < 2 {
            return Err(NetError::DegenerateFleet { agents: num_agents });
        }
        let encoder = init_dense_params(obs_dim, hidden_dim, seed, 0);
        let blocks = (0..num_blocks)
            .map(|l| init_dense_params(2 * hidden_dim, hidden_dim, seed, 1 + l as u64))
            .collect();
        let head = init_dense_params(hidden_dim, action_dim, seed, 1 + num_blocks as u64);
        Ok(CommNetPolicy {
            num_agents,
            obs_dim,
            hidden_dim,
            action_dim,
            encoder,
            blocks,
            head,
        })
    }

    fn layers(&self) -> impl Iterator<Item = &DenseLayer> {
        std::iter::once(&self.encoder)
            .chain(self.blocks.iter())
            .chain(std::iter::once(&self.head))
    }

    pub fn param_count(&self) -> usize {
        self.layers().map(|l| l.param_count()).sum()
    }

    /// Layer shapes as `(out, in)` pairs, in flatten order.
    pub fn shapes(&self) -> Vec<(usize, usize)> {
        self.layers().map(|l| (l.out_dim, l.in_dim)).collect()
    }

    /// Flatten all parameters (per layer: row-major weights, then biases).
    pub fn params_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for layer in self.layers() {
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
        for layer in std::iter::once(&mut self.encoder)
            .chain(self.blocks.iter_mut())
            .chain(std::iter::once(&mut self.head))
        {
            let w = layer.weights.len();
            layer.weights.copy_from_slice(&params[offset..offset + w]);
            offset += w;
            let b = layer.biases.len();
            layer.biases.copy_from_slice(&params[offset..offset + b]);
            offset += b;
        }
        Ok(())
    }

    /// Rectified encoder output h¹ for a single observation.
    pub fn encode(&self, obs: &[f64]) -> Result<Vec<f64>, NetError> {
        let mut h = self.encoder.forward(obs)?;
        relu_in_place(&mut h);
        Ok(h)
    }

    /// Joint forward for one sample: returns per-agent action probabilities
    /// as a row-major `[num_agents × action_dim]` vector.
    pub fn forward(&self, joint_obs: &[f64]) -> Result<Vec<f64>, NetError> {
        let (logits, _) = self.forward_batch_cached(joint_obs, 1)?;
        Ok(softmax_rows(&logits, self.num_agents, self.action_dim))
    }

    /// Joint logits for one sample, `[num_agents × action_dim]`.
    pub fn forward_logits(&self, joint_obs: &[f64]) -> Result<Vec<f64>, NetError> {
        let (logits, _) = self.forward_batch_cached(joint_obs, 1)?;
        Ok(logits)
    }

    /// Batched forward with cache. `joint_obs` is row-major
    /// `[batch × num_agents × obs_dim]`; the returned logits are
    /// `[batch × num_agents × action_dim]`.
    pub fn forward_batch_cached(
        &self,
        joint_obs: &[f64],
        batch: usize,
    ) -> Result<(Vec<f64>, CommNetCache), NetError> {
        let rows = batch * self.num_agents;
        if joint_obs.len() != rows * self.obs_dim {
            return Err(NetError::shape(format!(
                "expected {} observation values ({} samples x {} agents x {}), got {}",
                rows * self.obs_dim,
                batch,
                self.num_agents,
                self.obs_dim,
                joint_obs.len()
            )));
        }
        let m = self.num_agents;
        let h_dim = self.hidden_dim;

        let z_enc = self.encoder.forward_batch(joint_obs, rows);
        check_finite(0, &z_enc)?;
        let mut h = z_enc.clone();
        relu_in_place(&mut h);

        let mut hidden = vec![h];
        let mut concat = Vec::with_capacity(self.blocks.len());
        let mut z_blocks = Vec::with_capacity(self.blocks.len());

        for (l, block) in self.blocks.iter().enumerate() {
            let h_prev = hidden.last().unwrap();
            // Build [h | c] rows; c is the exclusion mean within each sample.
            let mut cat = vec![0.0; rows * 2 * h_dim];
            for b in 0..batch {
                let sample = &h_prev[b * m * h_dim..(b + 1) * m * h_dim];
                for agent in 0..m {
                    let row = &mut cat
                        [(b * m + agent) * 2 * h_dim..(b * m + agent + 1) * 2 * h_dim];
                    row[..h_dim]
                        .copy_from_slice(&sample[agent * h_dim..(agent + 1) * h_dim]);
                    let c = comm_mean(sample, m, h_dim, agent)?;
                    row[h_dim..].copy_from_slice(&c);
                }
            }
            let z = block.forward_batch(&cat, rows);
            check_finite(l + 1, &z)?;
            let mut h_next = z.clone();
            relu_in_place(&mut h_next);
            concat.push(cat);
            z_blocks.push(z);
            hidden.push(h_next);
        }

        let logits = self.head.forward_batch(hidden.last().unwrap(), rows);
        check_finite(self.blocks.len() + 1, &logits)?;

        Ok((
            logits,
            CommNetCache {
                batch,
                input: joint_obs.to_vec(),
                z_enc,
                hidden,
                concat,
                z_blocks,
            },
        ))
    }

    /// Backward pass from logit gradients; returns flattened parameter
    /// gradients aligned with [`CommNetPolicy::params_flat`].
    ///
    /// Gradient flows through the communication means: each agent's hidden
    /// state receives 1/(M−1) of every other agent's communication-slot
    /// gradient, and none of its own.
    pub fn backward_batch(
        &self,
        cache: &CommNetCache,
        dlogits: &[f64],
    ) -> Result<Vec<f64>, NetError> {
        let rows = cache.batch * self.num_agents;
        if dlogits.len() != rows * self.action_dim {
            return Err(NetError::shape(format!(
                "expected {} logit gradients, got {}",
                rows * self.action_dim,
                dlogits.len()
            )));
        }
        let m = self.num_agents;
        let h_dim = self.hidden_dim;

        let mut grads = vec![0.0; self.param_count()];
        // Slice the flat gradient buffer per layer, in flatten order.
        let mut offsets = Vec::new();
        let mut acc = 0;
        for layer in self.layers() {
            let w = layer.weights.len();
            let b = layer.biases.len();
            offsets.push((acc, acc + w, acc + w + b));
            acc += w + b;
        }

        // Head.
        let head_idx = offsets.len() - 1;
        let head_in = cache.hidden.last().unwrap();
        {
            let (w0, b0, end) = offsets[head_idx];
            let (dw, db) = grads[w0..end].split_at_mut(b0 - w0);
            self.head
                .accumulate_param_grads(head_in, dlogits, rows, dw, db);
        }
        let mut dh = self.head.backward_input(dlogits, rows);

        // Blocks, last to first.
        for l in (0..self.blocks.len()).rev() {
            let block = &self.blocks[l];
            let mut dz = dh;
            relu_backward(&mut dz, &cache.z_blocks[l]);
            {
                let (w0, b0, end) = offsets[1 + l];
                let (dw, db) = grads[w0..end].split_at_mut(b0 - w0);
                block.accumulate_param_grads(&cache.concat[l], &dz, rows, dw, db);
            }
            let dcat = block.backward_input(&dz, rows);

            // Split [dh_own | dc] and route dc through the exclusion mean.
            let mut dh_prev = vec![0.0; rows * h_dim];
            let scale = 1.0 / (m as f64 - 1.0);
            for b in 0..cache.batch {
                for agent in 0..m {
                    let row = &dcat[(b * m + agent) * 2 * h_dim
                        ..(b * m + agent + 1) * 2 * h_dim];
                    let own = &mut dh_prev
                        [(b * m + agent) * h_dim..(b * m + agent + 1) * h_dim];
                    for (o, r) in own.iter_mut().zip(&row[..h_dim]) {
                        *o += r;
                    }
                }
                for agent in 0..m {
                    let dc = &dcat[(b * m + agent) * 2 * h_dim + h_dim
                        ..(b * m + agent + 1) * 2 * h_dim];
                    for other in 0..m {
                        if other == agent {
                            continue;
                        }
                        let target = &mut dh_prev
                            [(b * m + other) * h_dim..(b * m + other + 1) * h_dim];
                        for (t, g) in target.iter_mut().zip(dc) {
                            *t += g * scale;
                        }
                    }
                }
            }
            dh = dh_prev;
        }

        // Encoder.
        let mut dz = dh;
        relu_backward(&mut dz, &cache.z_enc);
        {
            let (w0, b0, end) = offsets[0];
            let (dw, db) = grads[w0..end].split_at_mut(b0 - w0);
            self.encoder
                .accumulate_param_grads(&cache.input, &dz, rows, dw, db);
        }

        Ok(grads)
    }
}
