//! Deterministic discrete-time air-taxi world.
//!
//! A fixed map with a handful of vertiports, a fleet of battery-electric
//! aircraft, and a population of passengers who request rides at random
//! times. Aircraft fly a two-level altitude profile (ground and cruise),
//! establish radio links with waiting passengers inside a vertiport's cell
//! radius, board and deliver them, and fast-charge while parked. Every run
//! is bit-reproducible from its seed.

mod config;
mod error;
mod export;
mod observe;
mod state;
mod types;

pub use config::SimConfig;
pub use error::SimError;
pub use export::{write_event_log, write_trajectories};
pub use observe::{observation_length, Observation};
pub use state::{check_invariants, AgentStepEvents, SimState, StepOutcome};
pub use types::{Action, FlightMode, Passenger, PassengerStatus, UamAgent, Vertiport, NUM_ACTIONS};
