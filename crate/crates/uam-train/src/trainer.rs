use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use uam_energy::{BatterySpec, UamSpec};
use uam_net::{
    masked_softmax_rows, AdamState, CommNetPolicy, CriticNet, DnnPolicy,
};
use uam_reward::{common_reward, energy_reward, service_reward, total_reward, RewardConfig};
use uam_sim::{observation_length, Action, AgentStepEvents, SimConfig, SimState, NUM_ACTIONS};

use crate::bundle::PolicyBundle;
use crate::config::{Mode, TrainerConfig};
use crate::error::TrainError;
use crate::replay::{ReplayBuffer, Transition};
use crate::select::{greedy_from_logits, select_actions, ActionSelector};

/// One row of the training curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub episode: u32,
    /// Sum over the episode's steps of the team reward.
    pub total_reward: f64,
    pub epsilon: f64,
    /// Mean critic (or Q) loss over this episode's update cycles, if any ran.
    pub loss: Option<f64>,
    /// Passengers delivered by the end of the episode.
    pub serviced: u32,
}

/// Everything a finished training run produces.
pub struct TrainRun {
    pub mode: Mode,
    pub seed: u64,
    pub curve: Vec<EpisodeLog>,
    pub bundle: PolicyBundle,
}

/// Bootstrap targets: `y_i = r_i + γ·Q̂(S′_i, Â′_i)` with `Â′_i` the target
/// actor's greedy joint action under the next-state legal masks; terminal
/// transitions use `y_i = r_i`.
pub fn critic_target(
    batch: &[&Transition],
    target_actor: &CommNetPolicy,
    target_critic: &CriticNet,
    gamma: f64,
) -> Result<Vec<f64>, TrainError> {
    let m = target_actor.num_agents;
    let obs_len = target_actor.obs_dim;
    let batch_size = batch.len();

    let mut next_obs = Vec::with_capacity(batch_size * m * obs_len);
    let mut next_masks = Vec::with_capacity(batch_size * m * NUM_ACTIONS);
    for t in batch {
        next_obs.extend_from_slice(&t.next_obs);
        next_masks.extend_from_slice(&t.next_masks);
    }

    let (logits, _) = target_actor.forward_batch_cached(&next_obs, batch_size)?;
    let greedy = greedy_from_logits(&logits, &next_masks, batch_size * m);

    let critic_in_dim = m * obs_len + m * NUM_ACTIONS;
    let mut critic_in = vec![0.0; batch_size * critic_in_dim];
    for (i, t) in batch.iter().enumerate() {
        let row = &mut critic_in[i * critic_in_dim..(i + 1) * critic_in_dim];
        row[..m * obs_len].copy_from_slice(&t.next_obs);
        for agent in 0..m {
            row[m * obs_len + agent * NUM_ACTIONS + greedy[i * m + agent]] = 1.0;
        }
    }
    let (q_next, _) = target_critic.forward_batch_cached(&critic_in, batch_size)?;

    Ok(batch
        .iter()
        .zip(&q_next)
        .map(|(t, q)| {
            if t.done {
                t.team_reward
            } else {
                t.team_reward + gamma * q
            }
        })
        .collect())
}

/// Critic inputs `[obs‖one-hot actions]` for a batch of stored transitions.
fn critic_inputs(batch: &[&Transition], m: usize, obs_len: usize) -> Vec<f64> {
    let critic_in_dim = m * obs_len + m * NUM_ACTIONS;
    let mut input = vec![0.0; batch.len() * critic_in_dim];
    for (i, t) in batch.iter().enumerate() {
        let row = &mut input[i * critic_in_dim..(i + 1) * critic_in_dim];
        row[..m * obs_len].copy_from_slice(&t.obs);
        for agent in 0..m {
            row[m * obs_len + agent * NUM_ACTIONS + t.actions[agent]] = 1.0;
        }
    }
    input
}

/// One mean-squared-error descent step on the critic. Returns the loss.
pub fn critic_update(
    batch: &[&Transition],
    targets: &[f64],
    critic: &mut CriticNet,
    adam: &mut AdamState,
    m: usize,
    obs_len: usize,
) -> Result<f64, TrainError> {
    let batch_size = batch.len();
    let input = critic_inputs(batch, m, obs_len);
    let (q, cache) = critic.forward_batch_cached(&input, batch_size)?;

    let inv = 1.0 / batch_size as f64;
    let mut loss = 0.0;
    let mut dq = vec![0.0; batch_size];
    for i in 0..batch_size {
        let err = q[i] - targets[i];
        loss += err * err * inv;
        dq[i] = 2.0 * err * inv;
    }
    if !loss.is_finite() {
        return Err(TrainError::Numeric {
            episode: 0,
            step: 0,
            what: format!("critic loss is {loss}"),
        });
    }
    let grads = critic.backward_batch(&cache, &dq)?;
    let mut params = critic.params_flat();
    adam.apply(&mut params, &grads)?;
    critic.set_params_flat(&params)?;
    Ok(loss)
}

/// One ascent step on the score-function surrogate
/// `J = (1/I) Σ_i Q(S_i, A_i) · Σ_m log π(a_m,i | S_i)`, with the critic
/// held constant and log π taken over the mask-renormalized softmax.
/// Returns the surrogate value.
pub fn actor_update(
    batch: &[&Transition],
    actor: &mut CommNetPolicy,
    critic: &CriticNet,
    adam: &mut AdamState,
) -> Result<f64, TrainError> {
    let m = actor.num_agents;
    let obs_len = actor.obs_dim;
    let batch_size = batch.len();

    let input = critic_inputs(batch, m, obs_len);
    let (q, _) = critic.forward_batch_cached(&input, batch_size)?;

    let mut obs = Vec::with_capacity(batch_size * m * obs_len);
    let mut masks = Vec::with_capacity(batch_size * m * NUM_ACTIONS);
    for t in batch {
        obs.extend_from_slice(&t.obs);
        masks.extend_from_slice(&t.masks);
    }
    let (logits, cache) = actor.forward_batch_cached(&obs, batch_size)?;
    let probs = masked_softmax_rows(&logits, &masks, batch_size * m, NUM_ACTIONS);

    // d(−J)/dlogit[j] = −(Q_i/I)·(1{j = a} − π_j) on legal entries.
    let inv = 1.0 / batch_size as f64;
    let mut surrogate = 0.0;
    let mut dlogits = vec![0.0; batch_size * m * NUM_ACTIONS];
    for (i, t) in batch.iter().enumerate() {
        let weight = q[i] * inv;
        for agent in 0..m {
            let row = i * m + agent;
            let taken = t.actions[agent];
            let p_row = &probs[row * NUM_ACTIONS..(row + 1) * NUM_ACTIONS];
            surrogate += weight * p_row[taken].max(1e-300).ln();
            let d_row = &mut dlogits[row * NUM_ACTIONS..(row + 1) * NUM_ACTIONS];
            for j in 0..NUM_ACTIONS {
                if masks[row * NUM_ACTIONS + j] {
                    let indicator = (j == taken) as u32 as f64;
                    d_row[j] = -weight * (indicator - p_row[j]);
                }
            }
        }
    }
    if !surrogate.is_finite() {
        return Err(TrainError::Numeric {
            episode: 0,
            step: 0,
            what: format!("actor surrogate is {surrogate}"),
        });
    }

    let grads = actor.backward_batch(&cache, &dlogits)?;
    let mut params = actor.params_flat();
    adam.apply(&mut params, &grads)?;
    actor.set_params_flat(&params)?;
    Ok(surrogate)
}

/// One independent Q-learning step per agent: per-agent reward, greedy
/// bootstrap from that agent's target network under its next-state mask.
/// Returns the mean TD loss across agents.
#[allow(clippy::too_many_arguments)]
fn iql_update(
    batch: &[&Transition],
    qnets: &mut [DnnPolicy],
    target_qnets: &[DnnPolicy],
    adams: &mut [AdamState],
    gamma: f64,
    obs_len: usize,
) -> Result<f64, TrainError> {
    let batch_size = batch.len();
    let m = qnets.len();
    let inv = 1.0 / batch_size as f64;
    let mut total_loss = 0.0;

    for agent in 0..m {
        let mut obs = Vec::with_capacity(batch_size * obs_len);
        let mut next_obs = Vec::with_capacity(batch_size * obs_len);
        for t in batch {
            obs.extend_from_slice(&t.obs[agent * obs_len..(agent + 1) * obs_len]);
            next_obs.extend_from_slice(&t.next_obs[agent * obs_len..(agent + 1) * obs_len]);
        }

        let (q_next, _) = target_qnets[agent].forward_batch_cached(&next_obs, batch_size)?;
        let mut targets = Vec::with_capacity(batch_size);
        for (i, t) in batch.iter().enumerate() {
            let r = t.agent_rewards[agent];
            if t.done {
                targets.push(r);
            } else {
                let mask =
                    &t.next_masks[agent * NUM_ACTIONS..(agent + 1) * NUM_ACTIONS];
                let row = &q_next[i * NUM_ACTIONS..(i + 1) * NUM_ACTIONS];
                let best = row
                    .iter()
                    .zip(mask)
                    .filter(|(_, legal)| **legal)
                    .map(|(q, _)| *q)
                    .fold(f64::NEG_INFINITY, f64::max);
                targets.push(r + gamma * best);
            }
        }

        let (q, cache) = qnets[agent].forward_batch_cached(&obs, batch_size)?;
        let mut dout = vec![0.0; batch_size * NUM_ACTIONS];
        let mut loss = 0.0;
        for (i, t) in batch.iter().enumerate() {
            let taken = t.actions[agent];
            let err = q[i * NUM_ACTIONS + taken] - targets[i];
            loss += err * err * inv;
            dout[i * NUM_ACTIONS + taken] = 2.0 * err * inv;
        }
        if !loss.is_finite() {
            return Err(TrainError::Numeric {
                episode: 0,
                step: 0,
                what: format!("agent {agent} TD loss is {loss}"),
            });
        }
        let grads = qnets[agent].backward_batch(&cache, &dout)?;
        let mut params = qnets[agent].params_flat();
        adams[agent].apply(&mut params, &grads)?;
        qnets[agent].set_params_flat(&params)?;
        total_loss += loss;
    }
    Ok(total_loss / m as f64)
}

/// Training state for one run: networks, targets, optimizer, replay buffer.
pub struct Trainer {
    pub mode: Mode,
    pub trainer_config: TrainerConfig,
    pub sim_config: SimConfig,
    pub uam_spec: UamSpec,
    pub battery_spec: BatterySpec,
    pub reward_config: RewardConfig,
    pub obs_len: usize,
    pub seed: u64,

    actor: Option<CommNetPolicy>,
    critic: Option<CriticNet>,
    target_actor: Option<CommNetPolicy>,
    target_critic: Option<CriticNet>,
    actor_adam: Option<AdamState>,
    critic_adam: Option<AdamState>,

    qnets: Vec<DnnPolicy>,
    target_qnets: Vec<DnnPolicy>,
    qnet_adams: Vec<AdamState>,

    pub buffer: ReplayBuffer,
    rng: ChaCha8Rng,
    env_steps: u64,
    updates: u64,
}

impl Trainer {
    pub fn new(
        mode: Mode,
        sim_config: &SimConfig,
        uam_spec: &UamSpec,
        battery_spec: &BatterySpec,
        reward_config: &RewardConfig,
        trainer_config: &TrainerConfig,
        seed: u64,
    ) -> Result<Self, TrainError> {
        trainer_config.validate()?;
        sim_config.validate().map_err(TrainError::Sim)?;
        reward_config
            .validate()
            .map_err(|what| TrainError::InvalidConfig { what })?;

        let m = sim_config.num_agents;
        let obs_len = observation_length(
            m,
            sim_config.num_vertiports(),
            uam_spec.seat_count as usize,
        );
        let width = trainer_config.hidden_width;
        let layers = trainer_config.num_layers;

        let mut trainer = Trainer {
            mode,
            trainer_config: trainer_config.clone(),
            sim_config: sim_config.clone(),
            uam_spec: uam_spec.clone(),
            battery_spec: battery_spec.clone(),
            reward_config: reward_config.clone(),
            obs_len,
            seed,
            actor: None,
            critic: None,
            target_actor: None,
            target_critic: None,
            actor_adam: None,
            critic_adam: None,
            qnets: Vec::new(),
            target_qnets: Vec::new(),
            qnet_adams: Vec::new(),
            buffer: ReplayBuffer::new(trainer_config.buffer_capacity),
            rng: ChaCha8Rng::seed_from_u64(seed),
            env_steps: 0,
            updates: 0,
        };

        match mode {
            Mode::Commnet => {
                let actor =
                    CommNetPolicy::new(m, obs_len, width, layers, NUM_ACTIONS, seed)?;
                let critic_in = m * obs_len + m * NUM_ACTIONS;
                let critic = CriticNet::new(critic_in, &vec![width; layers], seed ^ 0x5EED);
                trainer.actor_adam = Some(AdamState::new(
                    actor.param_count(),
                    trainer_config.learning_rate,
                ));
                trainer.critic_adam = Some(AdamState::new(
                    critic.param_count(),
                    trainer_config.learning_rate,
                ));
                // Targets start as exact copies.
                trainer.target_actor = Some(actor.clone());
                trainer.target_critic = Some(critic.clone());
                trainer.actor = Some(actor);
                trainer.critic = Some(critic);
            }
            Mode::IqlDnn => {
                for agent in 0..m {
                    let net = DnnPolicy::new(
                        obs_len,
                        width,
                        layers,
                        NUM_ACTIONS,
                        seed.wrapping_add(agent as u64),
                    );
                    trainer
                        .qnet_adams
                        .push(AdamState::new(net.param_count(), trainer_config.learning_rate));
                    trainer.target_qnets.push(net.clone());
                    trainer.qnets.push(net);
                }
            }
        }
        Ok(trainer)
    }

    pub fn bundle(&self) -> PolicyBundle {
        match self.mode {
            Mode::Commnet => PolicyBundle::Commnet {
                actor: self.actor.clone().expect("commnet mode has an actor"),
                critic: self.critic.clone().expect("commnet mode has a critic"),
            },
            Mode::IqlDnn => PolicyBundle::Iql {
                qnets: self.qnets.clone(),
            },
        }
    }

    /// Targets are hard-copied every `target_sync_period_updates` cycles.
    fn maybe_sync_targets(&mut self) {
        if self.updates % self.trainer_config.target_sync_period_updates as u64 != 0 {
            return;
        }
        match self.mode {
            Mode::Commnet => {
                self.target_actor = self.actor.clone();
                self.target_critic = self.critic.clone();
            }
            Mode::IqlDnn => {
                self.target_qnets = self.qnets.clone();
            }
        }
    }

    /// Run one update cycle if the cadence and buffer fill allow it.
    fn maybe_update(&mut self) -> Result<Option<f64>, TrainError> {
        if self.env_steps % self.trainer_config.update_period_steps as u64 != 0 {
            return Ok(None);
        }
        if self.buffer.len() < self.trainer_config.min_fill {
            return Ok(None);
        }
        let batch = self
            .buffer
            .sample(
                self.trainer_config.batch_size,
                self.trainer_config.min_fill,
                &mut self.rng,
            )?
            .into_iter()
            .cloned()
            .collect::<Vec<_>>();
        let batch_refs: Vec<&Transition> = batch.iter().collect();

        let loss = match self.mode {
            Mode::Commnet => {
                let targets = critic_target(
                    &batch_refs,
                    self.target_actor.as_ref().unwrap(),
                    self.target_critic.as_ref().unwrap(),
                    self.trainer_config.gamma,
                )?;
                let loss = critic_update(
                    &batch_refs,
                    &targets,
                    self.critic.as_mut().unwrap(),
                    self.critic_adam.as_mut().unwrap(),
                    self.sim_config.num_agents,
                    self.obs_len,
                )?;
                actor_update(
                    &batch_refs,
                    self.actor.as_mut().unwrap(),
                    self.critic.as_ref().unwrap(),
                    self.actor_adam.as_mut().unwrap(),
                )?;
                loss
            }
            Mode::IqlDnn => iql_update(
                &batch_refs,
                &mut self.qnets,
                &self.target_qnets,
                &mut self.qnet_adams,
                self.trainer_config.gamma,
                self.obs_len,
            )?,
        };
        self.updates += 1;
        self.maybe_sync_targets();
        Ok(Some(loss))
    }

    /// Roll one episode, pushing transitions and running scheduled updates.
    /// Returns the episode log row.
    pub fn run_episode(&mut self, episode: u32, env_seed: u64) -> Result<EpisodeLog, TrainError> {
        let epsilon = self.trainer_config.epsilon_for_episode(episode);
        let mut state = SimState::reset(
            &self.sim_config,
            &self.uam_spec,
            &self.battery_spec,
            env_seed,
        )?;
        let mut cumulative_waits = vec![0.0f64; self.sim_config.num_passengers];
        let mut episode_reward = 0.0;
        let mut losses = Vec::new();

        let mut obs = state.observe_all();
        let mut masks = all_masks(&state)?;

        while !state.done() {
            let step_index = state.clock;
            let selector = match self.mode {
                Mode::Commnet => ActionSelector::Commnet(self.actor.as_ref().unwrap()),
                Mode::IqlDnn => ActionSelector::Iql(&self.qnets),
            };
            let actions = select_actions(&selector, &obs, &masks, epsilon, &mut self.rng)?;
            let joint: Vec<Action> = actions
                .iter()
                .map(|a| Action::from_index(*a))
                .collect::<Result<_, _>>()?;

            let outcome = state.step(&joint).map_err(TrainError::Sim)?;
            let (team, breakdowns) = step_rewards(
                &state,
                &outcome.events,
                &mut cumulative_waits,
                &self.reward_config,
            );
            episode_reward += team;

            let next_obs = state.observe_all();
            let next_masks = all_masks(&state)?;

            self.buffer.push(Transition {
                obs: obs.clone(),
                actions,
                team_reward: team,
                agent_rewards: breakdowns.iter().map(|b| b.total).collect(),
                next_obs: next_obs.clone(),
                masks: masks.clone(),
                next_masks: next_masks.clone(),
                done: outcome.done,
            });

            self.env_steps += 1;
            if let Some(loss) = self.maybe_update().map_err(|e| at_step(e, episode, step_index))? {
                losses.push(loss);
            }

            obs = next_obs;
            masks = next_masks;
        }

        let serviced = state
            .passengers
            .iter()
            .filter(|p| p.status == uam_sim::PassengerStatus::Delivered)
            .count() as u32;
        let loss = if losses.is_empty() {
            None
        } else {
            Some(losses.iter().sum::<f64>() / losses.len() as f64)
        };
        Ok(EpisodeLog {
            episode,
            total_reward: episode_reward,
            epsilon,
            loss,
            serviced,
        })
    }

    /// Target networks, exposed for the machinery tests.
    pub fn target_snapshot(&self) -> PolicyBundle {
        match self.mode {
            Mode::Commnet => PolicyBundle::Commnet {
                actor: self.target_actor.clone().unwrap(),
                critic: self.target_critic.clone().unwrap(),
            },
            Mode::IqlDnn => PolicyBundle::Iql {
                qnets: self.target_qnets.clone(),
            },
        }
    }

    pub fn updates_run(&self) -> u64 {
        self.updates
    }
}

fn at_step(e: TrainError, episode: u32, step: u32) -> TrainError {
    match e {
        TrainError::Numeric { what, .. } => TrainError::Numeric {
            episode,
            step,
            what,
        },
        other => other,
    }
}

/// Legal masks for every agent, flattened `[M × 7]`.
pub(crate) fn all_masks(state: &SimState) -> Result<Vec<bool>, TrainError> {
    let mut masks = Vec::with_capacity(state.agents.len() * NUM_ACTIONS);
    for agent in 0..state.agents.len() {
        masks.extend_from_slice(&state.legal_actions(agent)?);
    }
    Ok(masks)
}

/// Rewards for one completed step: updates the running waits, then assembles
/// each agent's factored reward. The team scalar is the sum of the totals.
pub(crate) fn step_rewards(
    state: &SimState,
    events: &[AgentStepEvents],
    cumulative_waits: &mut [f64],
    config: &RewardConfig,
) -> (f64, Vec<uam_reward::RewardBreakdown>) {
    for (j, wait) in cumulative_waits.iter_mut().enumerate() {
        if config.cumulative_wait {
            *wait += state.waiting_time_min(j);
        } else {
            *wait = state.waiting_time_min(j);
        }
    }
    let common = common_reward(cumulative_waits);

    let mut breakdowns = Vec::with_capacity(events.len());
    let mut team = 0.0;
    for e in events {
        let service = service_reward(e.pickups.len() as u32, e.dropoffs.len() as u32, config);
        let energy = energy_reward(
            e.energy_before_kwh,
            e.hover_step_kwh,
            e.cruise_step_kwh,
            e.vertical_action,
            e.move_action,
            config,
        );
        let breakdown = total_reward(common, service, energy, config);
        team += breakdown.total;
        breakdowns.push(breakdown);
    }
    (team, breakdowns)
}

/// Train one seed in one mode; the whole run is deterministic in `seed`.
pub fn train(
    mode: Mode,
    sim_config: &SimConfig,
    uam_spec: &UamSpec,
    battery_spec: &BatterySpec,
    reward_config: &RewardConfig,
    trainer_config: &TrainerConfig,
    seed: u64,
) -> Result<TrainRun, TrainError> {
    let mut trainer = Trainer::new(
        mode,
        sim_config,
        uam_spec,
        battery_spec,
        reward_config,
        trainer_config,
        seed,
    )?;
    let mut episode_seed_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x00E1_53ED);
    let mut curve = Vec::with_capacity(trainer_config.episodes as usize);
    for episode in 0..trainer_config.episodes {
        let env_seed = episode_seed_rng.gen::<u64>();
        curve.push(trainer.run_episode(episode, env_seed)?);
    }
    Ok(TrainRun {
        mode,
        seed,
        curve,
        bundle: trainer.bundle(),
    })
}
