use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::NetError;

/// What a checkpoint holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NetworkKind {
    CommnetActor,
    Critic,
    DnnQNet,
}

/// Versioned parameter checkpoint: shape spec, seed, and flat parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub kind: NetworkKind,
    /// Layer shapes as `(out, in)` pairs, in flatten order.
    pub shapes: Vec<(usize, usize)>,
    pub seed: u64,
    pub params: Vec<f64>,
}

pub const CHECKPOINT_VERSION: u32 = 1;

impl Checkpoint {
    pub fn new(kind: NetworkKind, shapes: Vec<(usize, usize)>, seed: u64, params: Vec<f64>) -> Self {
        Checkpoint {
            version: CHECKPOINT_VERSION,
            kind,
            shapes,
            seed,
            params,
        }
    }

    /// Verify the checkpoint against the shape spec of a concrete network.
    pub fn check_shapes(&self, kind: NetworkKind, shapes: &[(usize, usize)]) -> Result<(), NetError> {
        if self.version != CHECKPOINT_VERSION {
            return Err(NetError::CheckpointMismatch {
                what: format!(
                    "unsupported checkpoint version {} (expected {CHECKPOINT_VERSION})",
                    self.version
                ),
            });
        }
        if self.kind != kind {
            return Err(NetError::CheckpointMismatch {
                what: format!("checkpoint kind {:?} does not match expected {kind:?}", self.kind),
            });
        }
        if self.shapes != shapes {
            return Err(NetError::CheckpointMismatch {
                what: format!(
                    "layer shapes {:?} do not match expected {:?}",
                    self.shapes, shapes
                ),
            });
        }
        let expected: usize = shapes.iter().map(|(o, i)| o * i + o).sum();
        if self.params.len() != expected {
            return Err(NetError::CheckpointMismatch {
                what: format!(
                    "parameter count {} does not match shape spec total {expected}",
                    self.params.len()
                ),
            });
        }
        if self.params.iter().any(|p| !p.is_finite()) {
            return Err(NetError::CheckpointMismatch {
                what: "checkpoint contains non-finite parameters".to_string(),
            });
        }
        Ok(())
    }
}

/// Write a checkpoint as JSON (f64 values round-trip exactly).
pub fn save_checkpoint(path: &Path, checkpoint: &Checkpoint) -> Result<(), std::io::Error> {
    let json = serde_json::to_string(checkpoint)?;
    std::fs::write(path, json)
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint, NetError> {
    let data = std::fs::read_to_string(path).map_err(|e| NetError::CheckpointMismatch {
        what: format!("cannot read {}: {e}", path.display()),
    })?;
    serde_json::from_str(&data).map_err(|e| NetError::CheckpointMismatch {
        what: format!("cannot parse {}: {e}", path.display()),
    })
}
