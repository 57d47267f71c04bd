//! Minimal dense neural-network stack with exact analytic gradients.
//!
//! Three fixed architectures, all built from shared-weight dense layers:
//!
//! * [`CommNetPolicy`] — a multi-agent policy in which every hidden layer
//!   augments each agent's hidden state with the mean of the other agents'
//!   hidden states before the next dense block.
//! * [`DnnPolicy`] — a per-agent dense stack with no communication, used by
//!   the independent-learning baseline.
//! * [`CriticNet`] — a centralized action-value head over the concatenation
//!   of every agent's observation and one-hot action.
//!
//! Forward passes are pure; training uses cached forward passes plus
//! hand-derived backward passes, and a standard bias-corrected Adam step.

mod adam;
mod checkpoint;
mod commnet;
mod critic;
mod dnn;
mod error;
mod init;
mod layer;
pub mod linalg;
mod softmax;

pub use adam::AdamState;
pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint, NetworkKind};
pub use commnet::{comm_mean, CommNetCache, CommNetPolicy};
pub use critic::{CriticCache, CriticNet};
pub use dnn::{DnnCache, DnnPolicy};
pub use error::NetError;
pub use init::init_dense_params;
pub use layer::DenseLayer;
pub use softmax::{masked_softmax_rows, softmax_rows};
