use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid config: {what}")]
    InvalidConfig { what: String },

    /// The trainer submitted something the environment contract forbids.
    #[error("contract violation: {what}")]
    ContractViolation { what: String },

    /// Stepping a finished episode.
    #[error("episode already done at step {clock}")]
    EpisodeDone { clock: u32 },

    #[error(transparent)]
    Energy(#[from] uam_energy::EnergyError),
}

impl SimError {
    pub(crate) fn config(what: impl Into<String>) -> Self {
        SimError::InvalidConfig { what: what.into() }
    }

    pub(crate) fn contract(what: impl Into<String>) -> Self {
        SimError::ContractViolation { what: what.into() }
    }
}
