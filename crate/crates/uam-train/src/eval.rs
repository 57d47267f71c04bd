use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use uam_energy::{BatterySpec, UamSpec};
use uam_reward::RewardConfig;
use uam_sim::{Action, AgentStepEvents, PassengerStatus, SimConfig, SimState};

use crate::bundle::PolicyBundle;
use crate::error::TrainError;
use crate::select::{greedy_actions, ActionSelector};
use crate::trainer::{all_masks, step_rewards};

/// Metrics of one greedy evaluation episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeEval {
    pub env_seed: u64,
    pub serviced_per_agent: Vec<u32>,
    pub serviced_total: u32,
    /// Mean request-to-delivery time over this episode's delivered
    /// passengers; absent when nobody was delivered.
    pub mean_wait_min: Option<f64>,
    pub distinct_vertiports_per_agent: Vec<u32>,
    pub total_reward: f64,
}

/// Aggregated greedy-evaluation metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub episodes: Vec<EpisodeEval>,
    /// Mean serviced passengers per agent per episode.
    pub serviced_per_agent_mean: Vec<f64>,
    /// Mean total serviced passengers per episode.
    pub serviced_total_mean: f64,
    /// Mean wait over all delivered passengers across all episodes; absent
    /// when nothing was delivered anywhere.
    pub mean_wait_min: Option<f64>,
    pub distinct_vertiports_mean: Vec<f64>,
    pub total_reward_mean: f64,
}

/// Raw per-episode traces for file export.
pub struct EpisodeTrace {
    pub env_seed: u64,
    /// `positions[t][agent]`, including the initial position at t = 0.
    pub positions: Vec<Vec<[f64; 3]>>,
    pub events: Vec<Vec<AgentStepEvents>>,
    /// `rewards[t][agent]`: full reward factorization per step.
    pub rewards: Vec<Vec<uam_reward::RewardBreakdown>>,
}

/// Run greedy (ε = 0, argmax) evaluation episodes. Fully deterministic for
/// a given bundle and seed.
#[allow(clippy::too_many_arguments)]
pub fn evaluate(
    bundle: &PolicyBundle,
    sim_config: &SimConfig,
    uam_spec: &UamSpec,
    battery_spec: &BatterySpec,
    reward_config: &RewardConfig,
    episodes: u32,
    seed: u64,
) -> Result<(EvalReport, Vec<EpisodeTrace>), TrainError> {
    let selector = match bundle {
        PolicyBundle::Commnet { actor, .. } => ActionSelector::Commnet(actor),
        PolicyBundle::Iql { qnets } => ActionSelector::Iql(qnets),
    };
    let m = sim_config.num_agents;
    let mut seed_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0E7A_15ED);

    let mut report_episodes = Vec::with_capacity(episodes as usize);
    let mut traces = Vec::with_capacity(episodes as usize);

    for _ in 0..episodes {
        let env_seed = seed_rng.gen::<u64>();
        let mut state = SimState::reset(sim_config, uam_spec, battery_spec, env_seed)?;
        let mut cumulative_waits = vec![0.0f64; sim_config.num_passengers];
        let mut positions = vec![state.agents.iter().map(|a| a.position_m).collect::<Vec<_>>()];
        let mut all_events = Vec::new();
        let mut all_rewards = Vec::new();
        let mut serviced_per_agent = vec![0u32; m];
        let mut visited: Vec<std::collections::BTreeSet<usize>> =
            vec![Default::default(); m];
        let mut total_reward = 0.0;

        while !state.done() {
            let obs = state.observe_all();
            let masks = all_masks(&state)?;
            let actions = greedy_actions(&selector, &obs, &masks)?;
            let joint: Vec<Action> = actions
                .iter()
                .map(|a| Action::from_index(*a))
                .collect::<Result<_, _>>()?;
            let outcome = state.step(&joint)?;

            let (team, breakdowns) = step_rewards(
                &state,
                &outcome.events,
                &mut cumulative_waits,
                reward_config,
            );
            total_reward += team;

            for e in &outcome.events {
                serviced_per_agent[e.agent] += e.dropoffs.len() as u32;
                if let Some(v) = e.landed_at {
                    visited[e.agent].insert(v);
                }
            }
            positions.push(state.agents.iter().map(|a| a.position_m).collect());
            all_events.push(outcome.events);
            all_rewards.push(breakdowns);
        }

        let delivered: Vec<f64> = state
            .passengers
            .iter()
            .filter(|p| p.status == PassengerStatus::Delivered)
            .map(|p| state.waiting_time_min(p.id))
            .collect();
        let mean_wait_min = if delivered.is_empty() {
            None
        } else {
            Some(delivered.iter().sum::<f64>() / delivered.len() as f64)
        };

        report_episodes.push(EpisodeEval {
            env_seed,
            serviced_total: serviced_per_agent.iter().sum(),
            serviced_per_agent,
            mean_wait_min,
            distinct_vertiports_per_agent: visited.iter().map(|v| v.len() as u32).collect(),
            total_reward,
        });
        traces.push(EpisodeTrace {
            env_seed,
            positions,
            events: all_events,
            rewards: all_rewards,
        });
    }

    let count = report_episodes.len() as f64;
    let mut serviced_per_agent_mean = vec![0.0; m];
    let mut distinct_vertiports_mean = vec![0.0; m];
    let mut wait_sum = 0.0;
    let mut wait_count = 0usize;
    let mut serviced_total_mean = 0.0;
    let mut total_reward_mean = 0.0;
    for ep in &report_episodes {
        for agent in 0..m {
            serviced_per_agent_mean[agent] += ep.serviced_per_agent[agent] as f64 / count;
            distinct_vertiports_mean[agent] +=
                ep.distinct_vertiports_per_agent[agent] as f64 / count;
        }
        serviced_total_mean += ep.serviced_total as f64 / count;
        total_reward_mean += ep.total_reward / count;
        if let Some(w) = ep.mean_wait_min {
            // Weight by deliveries: reconstructs the global mean exactly.
            wait_sum += w * ep.serviced_total as f64;
            wait_count += ep.serviced_total as usize;
        }
    }
    let mean_wait_min = if wait_count == 0 {
        None
    } else {
        Some(wait_sum / wait_count as f64)
    };

    Ok((
        EvalReport {
            episodes: report_episodes,
            serviced_per_agent_mean,
            serviced_total_mean,
            mean_wait_min,
            distinct_vertiports_mean,
            total_reward_mean,
        },
        traces,
    ))
}
