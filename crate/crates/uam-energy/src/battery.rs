use serde::{Deserialize, Serialize};

use crate::error::EnergyError;
use crate::spec::BatterySpec;
use crate::J_PER_KWH;

/// Current charge of one battery pack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatteryState {
    pub energy_kwh: f64,
}

impl BatteryState {
    pub fn full(spec: &BatterySpec) -> Self {
        BatteryState {
            energy_kwh: spec.capacity_kwh,
        }
    }
}

/// Result of drawing energy from a battery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DischargeOutcome {
    pub state: BatteryState,
    /// True when the request exceeded the available charge and was clamped.
    pub depleted: bool,
}

/// Convert a power draw over a duration into kWh.
pub fn energy_for_step(power_w: f64, duration_s: f64) -> Result<f64, EnergyError> {
    for (name, v) in [("power_w", power_w), ("duration_s", duration_s)] {
        if !v.is_finite() || v < 0.0 {
            return Err(EnergyError::invalid(format!(
                "{name} must be finite and non-negative, got {v}"
            )));
        }
    }
    Ok(power_w * duration_s / J_PER_KWH)
}

/// Draw energy from the battery, clamping at empty.
pub fn discharge(state: BatteryState, energy_kwh: f64) -> Result<DischargeOutcome, EnergyError> {
    if !energy_kwh.is_finite() || energy_kwh < 0.0 {
        return Err(EnergyError::invalid(format!(
            "discharge energy must be finite and non-negative, got {energy_kwh}"
        )));
    }
    let remaining = state.energy_kwh - energy_kwh;
    if remaining < 0.0 {
        Ok(DischargeOutcome {
            state: BatteryState { energy_kwh: 0.0 },
            depleted: true,
        })
    } else {
        Ok(DischargeOutcome {
            state: BatteryState {
                energy_kwh: remaining,
            },
            depleted: false,
        })
    }
}

/// Charge from the fixed-power charger for a duration, clamping at capacity.
pub fn charge(
    state: BatteryState,
    spec: &BatterySpec,
    duration_s: f64,
) -> Result<BatteryState, EnergyError> {
    if !duration_s.is_finite() || duration_s < 0.0 {
        return Err(EnergyError::invalid(format!(
            "charge duration must be finite and non-negative, got {duration_s}"
        )));
    }
    let added = spec.charger_power_w * duration_s / J_PER_KWH;
    Ok(BatteryState {
        energy_kwh: (state.energy_kwh + added).min(spec.capacity_kwh),
    })
}
