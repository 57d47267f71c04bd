use crate::state::SimState;
use crate::types::FlightMode;

/// Fixed-length per-agent observation vector.
///
/// Layout, in order (M agents, K vertiports, ς seats):
///
/// | block                      | length      | normalization              |
/// |----------------------------|-------------|----------------------------|
/// | own position (x, y, z)     | 3           | half-extent, altitude      |
/// | distance to each other agent | M − 1     | 3D map diagonal            |
/// | distance to each vertiport | K           | 3D map diagonal            |
/// | waiting requesters per vertiport (0 outside cell radius) | K | N      |
/// | per seat: occupied flag, destination one-hot, accumulated wait | ς·(1+K+1) | wait by episode minutes |
/// | remaining energy           | 1           | battery capacity           |
/// | airborne flag              | 1           | —                          |
#[derive(Debug, Clone, PartialEq)]
pub struct Observation(pub Vec<f64>);

/// Observation length as a function of fleet size, vertiport count, and
/// seats.
pub fn observation_length(num_agents: usize, num_vertiports: usize, seats: usize) -> usize {
    3 + (num_agents - 1) + num_vertiports + num_vertiports + seats * (1 + num_vertiports + 1) + 1 + 1
}

impl SimState {
    /// Partial observation for one agent. Waiting-requester counts are
    /// visible only for vertiports within the cell radius of the agent's
    /// horizontal position; out-of-range entries are 0.
    pub fn observe(&self, agent: usize) -> Observation {
        let a = &self.agents[agent];
        let k = self.vertiports.len();
        let seats = a.seats.len();
        let half = self.config.half_extent_m;
        let alt = self.config.cruise_altitude_m;
        let diag = ((2.0 * half).powi(2) + (2.0 * half).powi(2) + alt.powi(2)).sqrt();
        let n = self.config.num_passengers as f64;
        let horizon_min = self.config.horizon_minutes();

        let mut v = Vec::with_capacity(observation_length(self.agents.len(), k, seats));

        v.push(a.position_m[0] / half);
        v.push(a.position_m[1] / half);
        v.push(a.position_m[2] / alt);

        for other in &self.agents {
            if other.id == agent {
                continue;
            }
            let d = ((a.position_m[0] - other.position_m[0]).powi(2)
                + (a.position_m[1] - other.position_m[1]).powi(2)
                + (a.position_m[2] - other.position_m[2]).powi(2))
            .sqrt();
            v.push(d / diag);
        }

        for vp in &self.vertiports {
            let d = ((a.position_m[0] - vp.position_m.0).powi(2)
                + (a.position_m[1] - vp.position_m.1).powi(2)
                + a.position_m[2].powi(2))
            .sqrt();
            v.push(d / diag);
        }

        for vp in &self.vertiports {
            let horizontal = ((a.position_m[0] - vp.position_m.0).powi(2)
                + (a.position_m[1] - vp.position_m.1).powi(2))
            .sqrt();
            if horizontal <= vp.cell_radius_m {
                let count = self
                    .passengers
                    .iter()
                    .filter(|p| p.is_pending_at_origin() && p.origin == vp.id)
                    .count();
                v.push(count as f64 / n);
            } else {
                v.push(0.0);
            }
        }

        for seat in 0..seats {
            match a.seats[seat] {
                Some(pid) => {
                    v.push(1.0);
                    let destination = self.passengers[pid].destination;
                    for vertiport in 0..k {
                        v.push(if vertiport == destination { 1.0 } else { 0.0 });
                    }
                    v.push(a.seat_waits_min[seat] / horizon_min);
                }
                None => {
                    v.push(0.0);
                    for _ in 0..k {
                        v.push(0.0);
                    }
                    v.push(0.0);
                }
            }
        }

        v.push(a.battery.energy_kwh / self.battery_spec.capacity_kwh);
        v.push(match a.mode {
            FlightMode::Airborne => 1.0,
            FlightMode::Landed { .. } => 0.0,
        });

        debug_assert_eq!(v.len(), observation_length(self.agents.len(), k, seats));
        Observation(v)
    }

    /// All agents' observations concatenated, row-major `[M × obs_len]`.
    pub fn observe_all(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for agent in 0..self.agents.len() {
            out.extend_from_slice(&self.observe(agent).0);
        }
        out
    }
}
