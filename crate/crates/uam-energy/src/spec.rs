use serde::{Deserialize, Serialize};

use crate::error::EnergyError;
use crate::J_PER_KWH;

/// Standard gravitational acceleration, m/s².
pub const STANDARD_GRAVITY_M_S2: f64 = 9.80665;

/// Aerodynamic constants of one aircraft.
///
/// The default constants describe a Joby S4-class four-seat eVTOL. Several
/// fields are nominally derived from others (`disc_area_m2` from the rotor
/// radius, `rotor_solidity` from the blade count, `tip_speed_m_s` from the
/// angular velocity); published tables round those values, so construction
/// checks them against their defining formulas at a tolerance that admits
/// the rounding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UamSpec {
    /// Maximum number of passengers, ς.
    pub seat_count: u32,
    /// Cruising flight speed v, m/s.
    pub flight_speed_m_s: f64,
    /// Aircraft mass including battery and propellers, kg.
    pub mass_kg: f64,
    /// Aircraft weight W = m·g, N.
    pub weight_n: f64,
    /// Rotor radius R, m.
    pub rotor_radius_m: f64,
    /// Rotor disc area A = πR², m².
    pub disc_area_m2: f64,
    /// Number of blades b.
    pub blade_count: u32,
    /// Rotor solidity s.
    pub rotor_solidity: f64,
    /// Blade angular velocity Ω, rad/s.
    pub blade_angular_velocity_rad_s: f64,
    /// Tip speed of the rotor blade U_tip, m/s.
    pub tip_speed_m_s: f64,
    /// Air density ρ, kg/m³.
    pub air_density_kg_m3: f64,
    /// Fuselage drag ratio d₀.
    pub fuselage_drag_ratio: f64,
    /// Mean rotor-induced velocity in hovering v₀, m/s.
    pub mean_induced_velocity_m_s: f64,
    /// Profile drag coefficient δ.
    pub profile_drag_coefficient: f64,
    /// Incremental correction factor to induced power k.
    pub induced_power_factor: f64,
}

impl UamSpec {
    /// Joby S4-class reference aircraft.
    pub fn joby_s4() -> Self {
        UamSpec {
            seat_count: 4,
            flight_speed_m_s: 73.762,
            mass_kg: 1815.0,
            weight_n: 17799.0,
            rotor_radius_m: 1.45,
            disc_area_m2: 6.61,
            blade_count: 5,
            rotor_solidity: 0.2449,
            blade_angular_velocity_rad_s: 78.0,
            tip_speed_m_s: 112.776,
            air_density_kg_m3: 1.225,
            fuselage_drag_ratio: 0.01,
            mean_induced_velocity_m_s: 26.45,
            profile_drag_coefficient: 0.045,
            induced_power_factor: 0.052,
        }
    }

    /// Validate positivity and derived-value consistency.
    ///
    /// Disc area must match πR² and solidity must match 0.2231·b/(πR) within
    /// 1e-3 relative; tip speed must match Ω·R within 5e-3 relative (the
    /// reference table carries a slightly inconsistent rounding there). The
    /// fuselage drag ratio and mean induced velocity are treated as free
    /// constants and only checked for positivity.
    pub fn validate(&self) -> Result<(), EnergyError> {
        if self.seat_count < 1 {
            return Err(EnergyError::inconsistent("seat_count must be at least 1"));
        }
        for (name, value) in [
            ("flight_speed_m_s", self.flight_speed_m_s),
            ("mass_kg", self.mass_kg),
            ("weight_n", self.weight_n),
            ("rotor_radius_m", self.rotor_radius_m),
            ("disc_area_m2", self.disc_area_m2),
            ("rotor_solidity", self.rotor_solidity),
            (
                "blade_angular_velocity_rad_s",
                self.blade_angular_velocity_rad_s,
            ),
            ("tip_speed_m_s", self.tip_speed_m_s),
            ("air_density_kg_m3", self.air_density_kg_m3),
            ("fuselage_drag_ratio", self.fuselage_drag_ratio),
            ("mean_induced_velocity_m_s", self.mean_induced_velocity_m_s),
            ("profile_drag_coefficient", self.profile_drag_coefficient),
            ("induced_power_factor", self.induced_power_factor),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(EnergyError::inconsistent(format!(
                    "{name} must be finite and strictly positive, got {value}"
                )));
            }
        }
        if self.blade_count < 1 {
            return Err(EnergyError::inconsistent("blade_count must be at least 1"));
        }

        let area = std::f64::consts::PI * self.rotor_radius_m * self.rotor_radius_m;
        check_derived("disc_area_m2 vs \u{3c0}R\u{b2}", self.disc_area_m2, area, 1e-3)?;

        let solidity = 0.2231 * self.blade_count as f64 / (std::f64::consts::PI * self.rotor_radius_m);
        check_derived(
            "rotor_solidity vs 0.2231b/(\u{3c0}R)",
            self.rotor_solidity,
            solidity,
            1e-3,
        )?;

        let tip = self.blade_angular_velocity_rad_s * self.rotor_radius_m;
        check_derived("tip_speed_m_s vs \u{3a9}R", self.tip_speed_m_s, tip, 5e-3)?;

        Ok(())
    }
}

impl Default for UamSpec {
    fn default() -> Self {
        UamSpec::joby_s4()
    }
}

fn check_derived(what: &str, stored: f64, derived: f64, rel_tol: f64) -> Result<(), EnergyError> {
    let rel = (stored - derived).abs() / derived.abs().max(f64::MIN_POSITIVE);
    if rel > rel_tol {
        return Err(EnergyError::inconsistent(format!(
            "{what}: stored {stored} vs derived {derived} (relative error {rel:.2e} > {rel_tol:.0e})"
        )));
    }
    Ok(())
}

/// Battery pack constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BatterySpec {
    /// Total battery capacity, kWh.
    pub capacity_kwh: f64,
    /// Charge taken on per journey at a turnaround, kWh.
    pub charge_per_journey_kwh: f64,
    /// Fast-charge time per journey, seconds.
    pub charge_time_per_journey_s: f64,
    /// Charger supply power, W.
    pub charger_power_w: f64,
}

impl BatterySpec {
    /// 150 kWh pack, 360 kW charger, 5-minute turnaround charge.
    pub fn joby_s4() -> Self {
        BatterySpec {
            capacity_kwh: 150.0,
            charge_per_journey_kwh: 30.0,
            charge_time_per_journey_s: 300.0,
            charger_power_w: 360_000.0,
        }
    }

    /// Validate positivity and the charger-power / journey-charge identity.
    pub fn validate(&self) -> Result<(), EnergyError> {
        for (name, value) in [
            ("capacity_kwh", self.capacity_kwh),
            ("charge_per_journey_kwh", self.charge_per_journey_kwh),
            ("charge_time_per_journey_s", self.charge_time_per_journey_s),
            ("charger_power_w", self.charger_power_w),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(EnergyError::inconsistent(format!(
                    "{name} must be finite and strictly positive, got {value}"
                )));
            }
        }
        if self.charge_per_journey_kwh > self.capacity_kwh {
            return Err(EnergyError::inconsistent(
                "charge_per_journey_kwh exceeds capacity_kwh",
            ));
        }
        let derived = self.charger_power_w * self.charge_time_per_journey_s / J_PER_KWH;
        let rel = (derived - self.charge_per_journey_kwh).abs()
            / self.charge_per_journey_kwh.abs().max(f64::MIN_POSITIVE);
        if rel > 1e-6 {
            return Err(EnergyError::inconsistent(format!(
                "charger_power_w \u{d7} charge_time_per_journey_s = {derived} kWh disagrees with charge_per_journey_kwh = {} (relative error {rel:.2e})",
                self.charge_per_journey_kwh
            )));
        }
        Ok(())
    }
}

impl Default for BatterySpec {
    fn default() -> Self {
        BatterySpec::joby_s4()
    }
}
