use rand::Rng;
use rand_chacha::ChaCha8Rng;
use uam_net::{masked_softmax_rows, CommNetPolicy, DnnPolicy, NetError};
use uam_sim::NUM_ACTIONS;

use crate::error::TrainError;

/// A policy stack that can score a joint observation: either the shared
/// communication policy or one independent network per agent.
pub enum ActionSelector<'a> {
    Commnet(&'a CommNetPolicy),
    Iql(&'a [DnnPolicy]),
}

impl ActionSelector<'_> {
    /// Per-agent logits `[M × 7]` for one joint observation `[M × obs_len]`.
    pub fn joint_logits(&self, joint_obs: &[f64]) -> Result<Vec<f64>, NetError> {
        match self {
            ActionSelector::Commnet(policy) => policy.forward_logits(joint_obs),
            ActionSelector::Iql(qnets) => {
                let obs_len = joint_obs.len() / qnets.len();
                let mut out = Vec::with_capacity(qnets.len() * NUM_ACTIONS);
                for (m, net) in qnets.iter().enumerate() {
                    out.extend(net.forward_logits(&joint_obs[m * obs_len..(m + 1) * obs_len])?);
                }
                Ok(out)
            }
        }
    }

    pub fn num_agents(&self) -> usize {
        match self {
            ActionSelector::Commnet(policy) => policy.num_agents,
            ActionSelector::Iql(qnets) => qnets.len(),
        }
    }
}

/// Inverse-CDF draw from one masked probability row.
pub fn sample_masked(probs: &[f64], mask: &[bool], rng: &mut ChaCha8Rng) -> usize {
    debug_assert_eq!(probs.len(), mask.len());
    let u: f64 = rng.gen::<f64>();
    let mut acc = 0.0;
    let mut last_legal = 0;
    for (i, (p, m)) in probs.iter().zip(mask).enumerate() {
        if *m {
            acc += p;
            last_legal = i;
            if u < acc {
                return i;
            }
        }
    }
    // Rounding left a sliver of probability mass; take the last legal entry.
    last_legal
}

/// ε-greedy joint action: per agent, explore uniformly over legal actions
/// with probability ε, otherwise sample from the policy's softmax restricted
/// to legal actions.
pub fn select_actions(
    selector: &ActionSelector,
    joint_obs: &[f64],
    masks: &[bool],
    epsilon: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<usize>, TrainError> {
    let m = selector.num_agents();
    debug_assert_eq!(masks.len(), m * NUM_ACTIONS);
    let logits = selector.joint_logits(joint_obs)?;
    let probs = masked_softmax_rows(&logits, masks, m, NUM_ACTIONS);

    let mut actions = Vec::with_capacity(m);
    for agent in 0..m {
        let mask = &masks[agent * NUM_ACTIONS..(agent + 1) * NUM_ACTIONS];
        let legal: Vec<usize> = (0..NUM_ACTIONS).filter(|a| mask[*a]).collect();
        if legal.is_empty() {
            return Err(TrainError::Numeric {
                episode: 0,
                step: 0,
                what: format!("agent {agent} has no legal action"),
            });
        }
        let explore: f64 = rng.gen();
        if explore < epsilon {
            actions.push(legal[rng.gen_range(0..legal.len())]);
        } else {
            let row = &probs[agent * NUM_ACTIONS..(agent + 1) * NUM_ACTIONS];
            actions.push(sample_masked(row, mask, rng));
        }
    }
    Ok(actions)
}

/// Greedy joint action: per agent, the argmax logit among legal actions
/// (ties resolve to the lowest action id). Deterministic.
pub fn greedy_actions(
    selector: &ActionSelector,
    joint_obs: &[f64],
    masks: &[bool],
) -> Result<Vec<usize>, TrainError> {
    let m = selector.num_agents();
    let logits = selector.joint_logits(joint_obs)?;
    Ok(greedy_from_logits(&logits, masks, m))
}

/// Argmax over legal logits per row.
pub(crate) fn greedy_from_logits(logits: &[f64], masks: &[bool], rows: usize) -> Vec<usize> {
    let mut actions = Vec::with_capacity(rows);
    for r in 0..rows {
        let row = &logits[r * NUM_ACTIONS..(r + 1) * NUM_ACTIONS];
        let mask = &masks[r * NUM_ACTIONS..(r + 1) * NUM_ACTIONS];
        let mut best = usize::MAX;
        let mut best_value = f64::NEG_INFINITY;
        for a in 0..NUM_ACTIONS {
            if mask[a] && row[a] > best_value {
                best = a;
                best_value = row[a];
            }
        }
        debug_assert_ne!(best, usize::MAX, "row {r} has no legal action");
        actions.push(best);
    }
    actions
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use uam_net::CommNetPolicy;

    #[test]
    fn epsilon_one_is_uniform_over_legal() {
        let policy = CommNetPolicy::new(2, 4, 8, 2, 7, 3).unwrap();
        let selector = ActionSelector::Commnet(&policy);
        let obs = vec![0.1; 8];
        // Agent 0: actions {0, 3, 5} legal; agent 1: all legal.
        let mut masks = vec![true; 14];
        for a in [1, 2, 4, 6] {
            masks[a] = false;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let draws = 30_000;
        let mut counts = [0usize; 7];
        for _ in 0..draws {
            let actions = select_actions(&selector, &obs, &masks, 1.0, &mut rng).unwrap();
            counts[actions[0]] += 1;
        }
        assert_eq!(counts[1] + counts[2] + counts[4] + counts[6], 0);
        let p = 1.0 / 3.0;
        let sigma = (p * (1.0 - p) / draws as f64).sqrt();
        for a in [0, 3, 5] {
            let freq = counts[a] as f64 / draws as f64;
            assert!(
                (freq - p).abs() <= 3.0 * sigma,
                "action {a}: freq {freq} vs {p}"
            );
        }
    }

    #[test]
    fn epsilon_zero_single_legal_action_is_certain() {
        let policy = CommNetPolicy::new(2, 4, 8, 2, 7, 3).unwrap();
        let selector = ActionSelector::Commnet(&policy);
        let obs = vec![0.3; 8];
        let mut masks = vec![false; 14];
        masks[6] = true; // agent 0: only landing
        for a in 7..14 {
            masks[a] = true;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let actions = select_actions(&selector, &obs, &masks, 0.0, &mut rng).unwrap();
            assert_eq!(actions[0], 6);
        }
    }

    #[test]
    fn greedy_is_deterministic_argmax() {
        let policy = CommNetPolicy::new(2, 4, 8, 2, 7, 11).unwrap();
        let selector = ActionSelector::Commnet(&policy);
        let obs = vec![0.7, -0.3, 0.2, 0.9, 0.0, 0.4, -0.6, 0.8];
        let masks = vec![true; 14];
        let a = greedy_actions(&selector, &obs, &masks).unwrap();
        let b = greedy_actions(&selector, &obs, &masks).unwrap();
        assert_eq!(a, b);

        // Masking the greedy action forces the runner-up.
        let mut restricted = masks.clone();
        restricted[a[0]] = false;
        let c = greedy_actions(&selector, &obs, &restricted).unwrap();
        assert_ne!(c[0], a[0]);
    }

    #[test]
    fn iql_selector_scores_agents_independently() {
        let qnets: Vec<DnnPolicy> = (0..3).map(|m| DnnPolicy::new(4, 6, 2, 7, m)).collect();
        let selector = ActionSelector::Iql(&qnets);
        let mut obs = vec![0.2; 12];
        let logits_base = selector.joint_logits(&obs).unwrap();
        // Perturb agent 2's observation: agents 0 and 1 are unaffected.
        obs[8] += 1.0;
        let logits_pert = selector.joint_logits(&obs).unwrap();
        assert_eq!(&logits_base[..14], &logits_pert[..14]);
        assert_ne!(&logits_base[14..], &logits_pert[14..]);
    }
}
