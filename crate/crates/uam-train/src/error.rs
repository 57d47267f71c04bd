use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("invalid trainer config: {what}")]
    InvalidConfig { what: String },

    /// The replay buffer has not reached the minimum fill yet.
    #[error("replay buffer not ready: {fill} of {min_fill} transitions")]
    BufferNotReady { fill: usize, min_fill: usize },

    #[error("numeric fault at episode {episode}, step {step}: {what}")]
    Numeric {
        episode: u32,
        step: u32,
        what: String,
    },

    #[error(transparent)]
    Net(#[from] uam_net::NetError),

    #[error(transparent)]
    Sim(#[from] uam_sim::SimError),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl TrainError {
    pub(crate) fn config(what: impl Into<String>) -> Self {
        TrainError::InvalidConfig { what: what.into() }
    }
}
