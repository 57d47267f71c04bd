use std::path::Path;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use uam_energy::{BatterySpec, UamSpec};
use uam_reward::RewardConfig;
use uam_sim::SimConfig;
use uam_train::TrainerConfig;

/// The whole experiment configuration as one TOML tree. Every key is
/// optional; unset keys take the built-in reference defaults, so an empty
/// file is the reference configuration.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FullConfig {
    pub uam: UamSpec,
    pub battery: BatterySpec,
    pub sim: SimConfig,
    pub reward: RewardConfig,
    pub trainer: TrainerConfig,
}

impl FullConfig {
    pub fn load(path: &Path) -> anyhow::Result<FullConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let config: FullConfig = toml::from_str(&text)
            .with_context(|| format!("cannot parse config file {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.uam.validate().map_err(|e| anyhow::anyhow!("{e}"))?;
        self.battery.validate().map_err(|e| anyhow::anyhow!("{e}"))?;
        self.sim.validate().map_err(|e| anyhow::anyhow!("{e}"))?;
        self.reward
            .validate()
            .map_err(|e| anyhow::anyhow!("invalid config: {e}"))?;
        self.trainer.validate().map_err(|e| anyhow::anyhow!("{e}"))?;
        if self.sim.num_agents < 2 {
            bail!("invalid config: sim.num_agents must be at least 2 (inter-agent communication needs a fleet)");
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}
