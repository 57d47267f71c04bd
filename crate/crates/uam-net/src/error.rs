use thiserror::Error;

/// Errors from the network stack.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetError {
    #[error("shape mismatch: {what}")]
    ShapeMismatch { what: String },

    #[error("numeric fault in layer {layer}: {what}")]
    NumericFault { layer: usize, what: String },

    /// Communication is undefined for a single-agent fleet.
    #[error("degenerate fleet: communication requires at least 2 agents, got {agents}")]
    DegenerateFleet { agents: usize },

    #[error("checkpoint rejected: {what}")]
    CheckpointMismatch { what: String },
}

impl NetError {
    pub(crate) fn shape(what: impl Into<String>) -> Self {
        NetError::ShapeMismatch { what: what.into() }
    }
}
