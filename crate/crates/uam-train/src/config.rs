use serde::{Deserialize, Serialize};

use crate::error::TrainError;

/// Which policy architecture to train.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Communication-based joint policy with a centralized critic.
    Commnet,
    /// Independent per-agent Q-networks, no communication.
    IqlDnn,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Commnet => "commnet",
            Mode::IqlDnn => "iql-dnn",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "commnet" => Ok(Mode::Commnet),
            "iql-dnn" => Ok(Mode::IqlDnn),
            other => Err(format!("unknown mode {other:?} (expected commnet or iql-dnn)")),
        }
    }
}

/// Learning hyper-parameters and update cadence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainerConfig {
    /// Discount factor γ.
    pub gamma: f64,
    /// Adam learning rate.
    pub learning_rate: f64,
    /// Mini-batch size I.
    pub batch_size: usize,
    /// Replay buffer capacity Φ.
    pub buffer_capacity: usize,
    /// Initial exploration rate ε₀.
    pub epsilon_init: f64,
    /// Linear ε decrement per episode.
    pub epsilon_anneal_per_episode: f64,
    /// Exploration floor.
    pub epsilon_floor: f64,
    /// Episodes per training run. Desk-scale default; set 100_000 for the
    /// full-length schedule.
    pub episodes: u32,
    /// Run one update cycle every this many environment steps.
    pub update_period_steps: u32,
    /// Hard-copy the target networks every this many update cycles.
    pub target_sync_period_updates: u32,
    /// Minimum buffer fill before any training.
    pub min_fill: usize,
    /// Hidden width of every dense layer.
    pub hidden_width: usize,
    /// Number of hidden blocks L.
    pub num_layers: usize,
    /// Greedy evaluation episodes per trained seed.
    pub eval_episodes: u32,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        TrainerConfig {
            gamma: 0.99,
            learning_rate: 5e-4,
            batch_size: 256,
            buffer_capacity: 10_000,
            epsilon_init: 0.3,
            epsilon_anneal_per_episode: 1e-4,
            epsilon_floor: 0.01,
            episodes: 5_000,
            update_period_steps: 4,
            target_sync_period_updates: 100,
            min_fill: 256,
            hidden_width: 64,
            num_layers: 6,
            eval_episodes: 5,
        }
    }
}

impl TrainerConfig {
    /// Exploration rate for a given episode index.
    pub fn epsilon_for_episode(&self, episode: u32) -> f64 {
        (self.epsilon_init - self.epsilon_anneal_per_episode * episode as f64)
            .max(self.epsilon_floor)
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        if !(0.0..=1.0).contains(&self.gamma) || !self.gamma.is_finite() {
            return Err(TrainError::config(format!(
                "trainer.gamma must lie in [0, 1], got {}",
                self.gamma
            )));
        }
        for (name, v) in [
            ("trainer.epsilon_init", self.epsilon_init),
            ("trainer.epsilon_floor", self.epsilon_floor),
        ] {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(TrainError::config(format!(
                    "{name} must lie in [0, 1], got {v}"
                )));
            }
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(TrainError::config(format!(
                "trainer.learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(self.epsilon_anneal_per_episode.is_finite() && self.epsilon_anneal_per_episode >= 0.0)
        {
            return Err(TrainError::config(
                "trainer.epsilon_anneal_per_episode must be non-negative",
            ));
        }
        if self.batch_size == 0 || self.batch_size > self.buffer_capacity {
            return Err(TrainError::config(format!(
                "trainer.batch_size must lie in [1, buffer_capacity = {}], got {}",
                self.buffer_capacity, self.batch_size
            )));
        }
        if self.min_fill < self.batch_size {
            return Err(TrainError::config(format!(
                "trainer.min_fill ({}) must be at least batch_size ({})",
                self.min_fill, self.batch_size
            )));
        }
        if self.episodes == 0
            || self.update_period_steps == 0
            || self.target_sync_period_updates == 0
            || self.eval_episodes == 0
        {
            return Err(TrainError::config(
                "trainer.episodes, update_period_steps, target_sync_period_updates, and eval_episodes must be at least 1",
            ));
        }
        if self.hidden_width == 0 || self.num_layers == 0 {
            return Err(TrainError::config(
                "trainer.hidden_width and num_layers must be at least 1",
            ));
        }
        Ok(())
    }
}
