use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::TrainError;

/// One joint transition. The per-agent legal masks ride along: the target
/// bootstrap needs the next-state masks and the actor update needs the
/// behavior-time masks; the baseline needs per-agent rewards.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    /// Joint observation, `[M × obs_len]`.
    pub obs: Vec<f64>,
    /// One action id per agent.
    pub actions: Vec<usize>,
    /// Team reward R_total = Σ_m R^m.
    pub team_reward: f64,
    /// Per-agent rewards R^m.
    pub agent_rewards: Vec<f64>,
    /// Joint next observation.
    pub next_obs: Vec<f64>,
    /// Legal masks at the observed state, `[M × 7]`.
    pub masks: Vec<bool>,
    /// Legal masks at the next state.
    pub next_masks: Vec<bool>,
    /// True when this transition ended the episode.
    pub done: bool,
}

/// Fixed-capacity FIFO ring of transitions.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    storage: Vec<Transition>,
    capacity: usize,
    cursor: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        ReplayBuffer {
            storage: Vec::with_capacity(capacity.min(16_384)),
            capacity,
            cursor: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.storage.len()
    }

    pub fn is_empty(&self) -> bool {
        self.storage.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Append, evicting the oldest transition when full.
    pub fn push(&mut self, transition: Transition) {
        if self.storage.len() < self.capacity {
            self.storage.push(transition);
        } else {
            self.storage[self.cursor] = transition;
            self.cursor = (self.cursor + 1) % self.capacity;
        }
    }

    /// Oldest-to-newest iteration order (survivors keep insertion order).
    pub fn iter_in_order(&self) -> impl Iterator<Item = &Transition> {
        let (newer, older) = self.storage.split_at(self.cursor);
        older.iter().chain(newer.iter())
    }

    /// Draw `batch` transitions uniformly with replacement. Signals
    /// not-ready while the fill is below `min_fill`.
    pub fn sample(
        &self,
        batch: usize,
        min_fill: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<&Transition>, TrainError> {
        if self.storage.len() < min_fill {
            return Err(TrainError::BufferNotReady {
                fill: self.storage.len(),
                min_fill,
            });
        }
        Ok((0..batch)
            .map(|_| &self.storage[rng.gen_range(0..self.storage.len())])
            .collect())
    }
}
