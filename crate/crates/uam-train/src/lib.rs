//! Training for the air-taxi fleet: a centralized-critic actor-critic over
//! the communication-based policy, and an independent Q-learning baseline
//! with per-agent networks. Both share the same replay buffer, target
//! networks, and ε-greedy machinery, so only the policy architecture and
//! reward routing differ.

mod bundle;
mod config;
mod error;
mod eval;
mod replay;
mod select;
mod trainer;

pub use bundle::{load_bundle, save_bundle, PolicyBundle};
pub use config::{Mode, TrainerConfig};
pub use error::TrainError;
pub use eval::{evaluate, EpisodeEval, EvalReport};
pub use replay::{ReplayBuffer, Transition};
pub use select::{greedy_actions, sample_masked, select_actions, ActionSelector};
pub use trainer::{
    actor_update, critic_target, critic_update, train, EpisodeLog, TrainRun, Trainer,
};
