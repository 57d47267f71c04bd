use thiserror::Error;

/// Errors produced by the power and battery model.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnergyError {
    /// An input was non-finite, negative, or outside its physical range.
    #[error("invalid parameter: {what}")]
    InvalidParameter { what: String },

    /// The aerodynamic model was evaluated outside its domain of validity.
    #[error("model domain violation: {what}")]
    ModelDomain { what: String },

    /// A vehicle or battery spec failed its consistency checks.
    #[error("inconsistent spec: {what}")]
    InconsistentSpec { what: String },
}

impl EnergyError {
    pub(crate) fn invalid(what: impl Into<String>) -> Self {
        EnergyError::InvalidParameter { what: what.into() }
    }

    pub(crate) fn inconsistent(what: impl Into<String>) -> Self {
        EnergyError::InconsistentSpec { what: what.into() }
    }
}
