use serde::{Deserialize, Serialize};

use crate::error::SimError;

/// World geometry, fleet size, and episode timing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    /// Half the side length of the square map, meters. The flyable region is
    /// |x| ≤ half_extent, |y| ≤ half_extent.
    pub half_extent_m: f64,
    /// Cruise altitude, meters.
    pub cruise_altitude_m: f64,
    /// Wall-clock seconds per simulation step.
    pub step_duration_s: f64,
    /// Episode length in steps.
    pub horizon_steps: u32,
    /// Fleet size M.
    pub num_agents: usize,
    /// Passenger population N.
    pub num_passengers: usize,
    /// Communication cell radius ζ around each vertiport, meters.
    pub cell_radius_m: f64,
    /// Vertiport ground coordinates, meters.
    pub vertiports_m: Vec<(f64, f64)>,
    /// Mass added per onboard passenger, kg.
    pub passenger_mass_kg: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            half_extent_m: 6_000.0,
            cruise_altitude_m: 600.0,
            step_duration_s: 60.0,
            horizon_steps: 100,
            num_agents: 4,
            num_passengers: 25,
            cell_radius_m: 3_000.0,
            vertiports_m: vec![
                (0.0, 6_000.0),
                (-6_000.0, 1_000.0),
                (6_000.0, 1_000.0),
                (-4_000.0, -6_000.0),
                (4_000.0, -6_000.0),
            ],
            passenger_mass_kg: 100.0,
        }
    }
}

impl SimConfig {
    pub fn num_vertiports(&self) -> usize {
        self.vertiports_m.len()
    }

    /// Episode length in minutes.
    pub fn horizon_minutes(&self) -> f64 {
        self.horizon_steps as f64 * self.step_duration_s / 60.0
    }

    pub fn validate(&self) -> Result<(), SimError> {
        for (name, v) in [
            ("sim.half_extent_m", self.half_extent_m),
            ("sim.cruise_altitude_m", self.cruise_altitude_m),
            ("sim.step_duration_s", self.step_duration_s),
            ("sim.cell_radius_m", self.cell_radius_m),
            ("sim.passenger_mass_kg", self.passenger_mass_kg),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(SimError::config(format!(
                    "{name} must be finite and strictly positive, got {v}"
                )));
            }
        }
        if self.horizon_steps < 1 {
            return Err(SimError::config("sim.horizon_steps must be at least 1"));
        }
        if self.num_agents < 1 {
            return Err(SimError::config("sim.num_agents must be at least 1"));
        }
        if self.num_passengers < 1 {
            return Err(SimError::config("sim.num_passengers must be at least 1"));
        }
        if self.vertiports_m.len() < 2 {
            return Err(SimError::config(
                "sim.vertiports_m needs at least 2 vertiports (origins must differ from destinations)",
            ));
        }
        for (k, (x, y)) in self.vertiports_m.iter().enumerate() {
            if !x.is_finite() || !y.is_finite() {
                return Err(SimError::config(format!(
                    "sim.vertiports_m[{k}] has non-finite coordinates"
                )));
            }
            if x.abs() > self.half_extent_m || y.abs() > self.half_extent_m {
                return Err(SimError::config(format!(
                    "sim.vertiports_m[{k}] = ({x}, {y}) lies outside the ±{} m map",
                    self.half_extent_m
                )));
            }
        }
        Ok(())
    }
}
