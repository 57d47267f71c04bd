//! Rotorcraft power and battery energy model for an eVTOL air-taxi fleet.
//!
//! Power draws come from classic rotorcraft momentum theory: a hover/climb
//! model (blade-profile plus induced power) and a forward-flight model that
//! adds a parasite term. Batteries are simple kWh stores with a fixed-power
//! fast charger.

mod battery;
mod error;
mod power;
mod spec;

pub use battery::{charge, discharge, energy_for_step, BatteryState, DischargeOutcome};
pub use error::EnergyError;
pub use power::{
    cruise_power, cruise_power_raw, hover_power, hover_power_raw, CruisePower, HoverPower,
};
pub use spec::{BatterySpec, UamSpec, STANDARD_GRAVITY_M_S2};

/// Joules per kilowatt-hour.
pub const J_PER_KWH: f64 = 3.6e6;
