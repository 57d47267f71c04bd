use serde::{Deserialize, Serialize};
use uam_energy::BatteryState;

use crate::error::SimError;

/// Size of the discrete action set.
pub const NUM_ACTIONS: usize = 7;

/// The seven discrete actions. Hover doubles as "stay parked and charge"
/// while landed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Action {
    MoveXPlus,
    MoveXMinus,
    MoveYPlus,
    MoveYMinus,
    Hover,
    Takeoff,
    Land,
}

impl Action {
    pub const ALL: [Action; NUM_ACTIONS] = [
        Action::MoveXPlus,
        Action::MoveXMinus,
        Action::MoveYPlus,
        Action::MoveYMinus,
        Action::Hover,
        Action::Takeoff,
        Action::Land,
    ];

    pub fn index(self) -> usize {
        match self {
            Action::MoveXPlus => 0,
            Action::MoveXMinus => 1,
            Action::MoveYPlus => 2,
            Action::MoveYMinus => 3,
            Action::Hover => 4,
            Action::Takeoff => 5,
            Action::Land => 6,
        }
    }

    pub fn from_index(index: usize) -> Result<Action, SimError> {
        Action::ALL
            .get(index)
            .copied()
            .ok_or_else(|| SimError::contract(format!("action index {index} out of range")))
    }

    pub fn name(self) -> &'static str {
        match self {
            Action::MoveXPlus => "move+x",
            Action::MoveXMinus => "move-x",
            Action::MoveYPlus => "move+y",
            Action::MoveYMinus => "move-y",
            Action::Hover => "hover",
            Action::Takeoff => "takeoff",
            Action::Land => "land",
        }
    }

    /// True for the takeoff/landing/hover family (hover only while airborne;
    /// parked hover is idle charging and sets neither indicator).
    pub fn is_vertical_family(self) -> bool {
        matches!(self, Action::Hover | Action::Takeoff | Action::Land)
    }

    pub fn is_move(self) -> bool {
        matches!(
            self,
            Action::MoveXPlus | Action::MoveXMinus | Action::MoveYPlus | Action::MoveYMinus
        )
    }
}

/// Ground facility where aircraft land, exchange passengers, and charge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vertiport {
    pub id: usize,
    pub position_m: (f64, f64),
    pub cell_radius_m: f64,
}

/// Passenger lifecycle: dormant → waiting → linked → onboard → delivered,
/// with linked → waiting allowed when a radio link breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PassengerStatus {
    Dormant,
    Waiting,
    Linked { agent: usize },
    Onboard { agent: usize, seat: usize },
    Delivered,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Passenger {
    pub id: usize,
    pub origin: usize,
    pub destination: usize,
    pub request_step: u32,
    pub status: PassengerStatus,
    pub delivery_step: Option<u32>,
}

impl Passenger {
    pub fn is_pending_at_origin(&self) -> bool {
        matches!(
            self.status,
            PassengerStatus::Waiting | PassengerStatus::Linked { .. }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlightMode {
    Landed { vertiport: usize },
    Airborne,
}

/// One aircraft.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UamAgent {
    pub id: usize,
    pub position_m: [f64; 3],
    pub mode: FlightMode,
    pub battery: BatteryState,
    /// Seat slots holding passenger ids.
    pub seats: Vec<Option<usize>>,
    /// Linked (not yet boarded) passenger ids, each reserving a seat.
    pub links: Vec<usize>,
    /// Accumulated wait of each seat's occupant, minutes.
    pub seat_waits_min: Vec<f64>,
}

impl UamAgent {
    pub fn occupied_seats(&self) -> usize {
        self.seats.iter().filter(|s| s.is_some()).count()
    }

    /// Seats still free once pending links are accounted for.
    pub fn free_capacity(&self) -> usize {
        self.seats.len() - self.occupied_seats() - self.links.len()
    }

    pub fn is_landed(&self) -> bool {
        matches!(self.mode, FlightMode::Landed { .. })
    }
}
