//! Reward shaping for cooperative air-taxi fleet control.
//!
//! Each agent's scalar reward factors a fleet-wide common term (driven by
//! passenger waiting times) with an individual term (service events gated by
//! battery management): `R^m = ρ_s · R_c · (1 + R_s^m · R_e^m)`.

use serde::{Deserialize, Serialize};

/// Tunable reward constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RewardConfig {
    /// Scaling factor ρ_s applied to every agent's total reward.
    pub scaling_factor: f64,
    /// Reward granted per pickup or dropoff event.
    pub service_event_reward: f64,
    /// Energy normalizer (battery capacity, kWh).
    pub energy_normalizer_kwh: f64,
    /// When true the common reward uses the running sum of each passenger's
    /// waiting time over all steps so far; when false only the current wait.
    pub cumulative_wait: bool,
}

impl Default for RewardConfig {
    fn default() -> Self {
        RewardConfig {
            scaling_factor: 1.0,
            service_event_reward: 1.0,
            energy_normalizer_kwh: 150.0,
            cumulative_wait: true,
        }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.scaling_factor.is_finite() && self.scaling_factor > 0.0) {
            return Err(format!(
                "reward.scaling_factor must be finite and > 0, got {}",
                self.scaling_factor
            ));
        }
        if !(self.service_event_reward.is_finite() && self.service_event_reward >= 0.0) {
            return Err(format!(
                "reward.service_event_reward must be finite and >= 0, got {}",
                self.service_event_reward
            ));
        }
        if !(self.energy_normalizer_kwh.is_finite() && self.energy_normalizer_kwh > 0.0) {
            return Err(format!(
                "reward.energy_normalizer_kwh must be finite and > 0, got {}",
                self.energy_normalizer_kwh
            ));
        }
        Ok(())
    }
}

/// One agent's reward for one step, with every factor retained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown {
    /// Common reward R_c shared by the fleet.
    pub common: f64,
    /// Service reward R_s^m.
    pub service: f64,
    /// Energy reward R_e^m.
    pub energy: f64,
    /// Individual reward R_i^m = R_s^m · R_e^m.
    pub individual: f64,
    /// Total reward R^m = ρ_s · R_c · (1 + R_i^m).
    pub total: f64,
}

/// Fleet-wide common reward from per-passenger accumulated waits.
///
/// `R_c = Σ_j 1 / (1 + Σ₀ᵗ W^j)`, one term per passenger. Passengers that
/// have not requested yet contribute 1.
pub fn common_reward(cumulative_waits_min: &[f64]) -> f64 {
    cumulative_waits_min
        .iter()
        .map(|w| 1.0 / (1.0 + w.max(0.0)))
        .sum()
}

/// Per-step service reward: a fixed unit per pickup or dropoff event.
pub fn service_reward(pickups: u32, dropoffs: u32, config: &RewardConfig) -> f64 {
    config.service_event_reward * (pickups + dropoffs) as f64
}

/// Battery-management reward.
///
/// Remaining energy minus the nominal energy demand of the action taken,
/// normalized so a full battery with no consumption scores 1. `a_h` marks
/// takeoff/landing/hover actions, `a_p` marks cruise moves; a landed, idle
/// agent sets neither.
pub fn energy_reward(
    remaining_kwh: f64,
    hover_energy_kwh: f64,
    cruise_energy_kwh: f64,
    a_h: bool,
    a_p: bool,
    config: &RewardConfig,
) -> f64 {
    let consumption = hover_energy_kwh * (a_h as u32 as f64)
        + cruise_energy_kwh * (a_p as u32 as f64);
    (remaining_kwh - consumption) / config.energy_normalizer_kwh
}

/// Assemble one agent's total reward and its breakdown.
pub fn total_reward(
    common: f64,
    service: f64,
    energy: f64,
    config: &RewardConfig,
) -> RewardBreakdown {
    let individual = service * energy;
    let total = config.scaling_factor * common * (1.0 + individual);
    RewardBreakdown {
        common,
        service,
        energy,
        individual,
        total,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn common_reward_counts_fresh_passengers_fully() {
        let waits = vec![0.0; 25];
        assert_eq!(common_reward(&waits), 25.0);
    }

    #[test]
    fn common_reward_small_case() {
        assert_relative_eq!(common_reward(&[9.0, 0.0]), 1.1, max_relative = 1e-12);
    }

    #[test]
    fn common_reward_decreases_with_any_wait() {
        let base = common_reward(&[1.0, 2.0, 3.0]);
        for i in 0..3 {
            let mut waits = [1.0, 2.0, 3.0];
            waits[i] += 0.5;
            assert!(common_reward(&waits) < base);
        }
    }

    #[test]
    fn service_reward_counts_events() {
        let config = RewardConfig::default();
        assert_eq!(service_reward(1, 0, &config), 1.0);
        assert_eq!(service_reward(0, 0, &config), 0.0);
        assert_eq!(service_reward(1, 2, &config), 3.0);
    }

    #[test]
    fn energy_reward_examples() {
        let config = RewardConfig::default();
        assert_eq!(energy_reward(150.0, 10.6, 4.362, false, false, &config), 1.0);
        assert_relative_eq!(
            energy_reward(150.0, 10.6, 4.362, false, true, &config),
            0.97092,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            energy_reward(0.0, 10.6, 4.362, true, false, &config),
            -0.07066666666666667,
            max_relative = 1e-12
        );
    }

    #[test]
    fn total_reward_examples() {
        let config = RewardConfig::default();
        let plain = total_reward(25.0, 0.0, 0.5, &config);
        assert_eq!(plain.total, 25.0);
        assert_eq!(plain.individual, 0.0);

        let serviced = total_reward(25.0, 1.0, 0.97, &config);
        assert_relative_eq!(serviced.total, 49.25, max_relative = 1e-12);
    }

    #[test]
    fn scaling_factor_is_linear() {
        let base = RewardConfig::default();
        let scaled = RewardConfig {
            scaling_factor: 0.1,
            ..RewardConfig::default()
        };
        let a = total_reward(17.0, 2.0, 0.8, &base);
        let b = total_reward(17.0, 2.0, 0.8, &scaled);
        assert_relative_eq!(b.total, 0.1 * a.total, max_relative = 1e-12);
    }

    #[test]
    fn no_service_event_means_common_only() {
        let config = RewardConfig::default();
        for energy in [-0.07, 0.0, 0.5, 1.0] {
            let r = total_reward(12.5, 0.0, energy, &config);
            assert_eq!(r.total, config.scaling_factor * 12.5);
        }
    }

    #[test]
    fn config_validation() {
        assert!(RewardConfig::default().validate().is_ok());
        let bad = RewardConfig {
            scaling_factor: 0.0,
            ..RewardConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
