use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uam_energy::{
    charge, cruise_power, discharge, energy_for_step, hover_power, BatterySpec, BatteryState,
    UamSpec, STANDARD_GRAVITY_M_S2,
};

use crate::config::SimConfig;
use crate::error::SimError;
use crate::types::{
    Action, FlightMode, Passenger, PassengerStatus, UamAgent, Vertiport, NUM_ACTIONS,
};

/// Full world snapshot; the single source of truth per step.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub clock: u32,
    pub agents: Vec<UamAgent>,
    pub passengers: Vec<Passenger>,
    pub vertiports: Vec<Vertiport>,
    pub rng: ChaCha8Rng,
    pub config: SimConfig,
    pub uam_spec: UamSpec,
    pub battery_spec: BatterySpec,
}

/// Per-agent record of what happened during one step, consumed by the
/// reward computation and the event log.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentStepEvents {
    pub agent: usize,
    pub action: Action,
    /// Battery level before the action's energy was drawn, kWh.
    pub energy_before_kwh: f64,
    /// Nominal energy demand of the action (not clamped by an empty
    /// battery), kWh.
    pub energy_demand_kwh: f64,
    /// Per-step hover energy at this agent's payload, kWh.
    pub hover_step_kwh: f64,
    /// Per-step cruise energy at this agent's payload, kWh.
    pub cruise_step_kwh: f64,
    /// Takeoff/landing/hover indicator.
    pub vertical_action: bool,
    /// Cruise-move indicator.
    pub move_action: bool,
    pub depleted: bool,
    /// Vertiport landed on this step, if any.
    pub landed_at: Option<usize>,
    /// Passenger ids boarded this step.
    pub pickups: Vec<usize>,
    /// Passenger ids delivered this step.
    pub dropoffs: Vec<usize>,
    /// Passenger ids newly linked this step.
    pub links_made: Vec<usize>,
    /// Passenger ids whose links broke this step.
    pub links_broken: Vec<usize>,
    /// Position after the step, meters.
    pub position_m: [f64; 3],
}

impl AgentStepEvents {
    fn new(agent: usize) -> Self {
        AgentStepEvents {
            agent,
            action: Action::Hover,
            energy_before_kwh: 0.0,
            energy_demand_kwh: 0.0,
            hover_step_kwh: 0.0,
            cruise_step_kwh: 0.0,
            vertical_action: false,
            move_action: false,
            depleted: false,
            landed_at: None,
            pickups: Vec::new(),
            dropoffs: Vec::new(),
            links_made: Vec::new(),
            links_broken: Vec::new(),
            position_m: [0.0; 3],
        }
    }
}

/// Result of one environment step.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub events: Vec<AgentStepEvents>,
    pub done: bool,
}

impl SimState {
    /// Fresh world: fleet airborne over the map center with full batteries,
    /// passengers assigned uniformly random origin/destination pairs and
    /// request times in [0, horizon).
    pub fn reset(
        config: &SimConfig,
        uam_spec: &UamSpec,
        battery_spec: &BatterySpec,
        seed: u64,
    ) -> Result<SimState, SimError> {
        config.validate()?;
        uam_spec.validate()?;
        battery_spec.validate()?;

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = config.num_vertiports();

        let vertiports = config
            .vertiports_m
            .iter()
            .enumerate()
            .map(|(id, (x, y))| Vertiport {
                id,
                position_m: (*x, *y),
                cell_radius_m: config.cell_radius_m,
            })
            .collect();

        let agents = (0..config.num_agents)
            .map(|id| UamAgent {
                id,
                position_m: [0.0, 0.0, config.cruise_altitude_m],
                mode: FlightMode::Airborne,
                battery: BatteryState::full(battery_spec),
                seats: vec![None; uam_spec.seat_count as usize],
                links: Vec::new(),
                seat_waits_min: vec![0.0; uam_spec.seat_count as usize],
            })
            .collect();

        let passengers = (0..config.num_passengers)
            .map(|id| {
                let origin = rng.gen_range(0..k);
                let destination = (origin + 1 + rng.gen_range(0..k - 1)) % k;
                let request_step = rng.gen_range(0..config.horizon_steps);
                Passenger {
                    id,
                    origin,
                    destination,
                    request_step,
                    status: PassengerStatus::Dormant,
                    delivery_step: None,
                }
            })
            .collect();

        Ok(SimState {
            clock: 0,
            agents,
            passengers,
            vertiports,
            rng,
            config: config.clone(),
            uam_spec: uam_spec.clone(),
            battery_spec: battery_spec.clone(),
        })
    }

    pub fn done(&self) -> bool {
        self.clock >= self.config.horizon_steps
    }

    fn horizontal_distance(&self, position: &[f64; 3], vertiport: usize) -> f64 {
        let (vx, vy) = self.vertiports[vertiport].position_m;
        ((position[0] - vx).powi(2) + (position[1] - vy).powi(2)).sqrt()
    }

    /// Nearest vertiport within the cell radius of the agent's horizontal
    /// position, if any.
    fn vertiport_in_range(&self, agent: usize) -> Option<usize> {
        let position = &self.agents[agent].position_m;
        let mut best: Option<(usize, f64)> = None;
        for v in &self.vertiports {
            let d = self.horizontal_distance(position, v.id);
            if d <= v.cell_radius_m {
                match best {
                    Some((_, bd)) if bd <= d => {}
                    _ => best = Some((v.id, d)),
                }
            }
        }
        best.map(|(id, _)| id)
    }

    /// Payload weight of the passengers currently onboard, newtons.
    fn payload_n(&self, agent: usize) -> f64 {
        self.agents[agent].occupied_seats() as f64
            * self.config.passenger_mass_kg
            * STANDARD_GRAVITY_M_S2
    }

    /// Per-step hover energy at the given payload, kWh.
    pub fn hover_step_kwh(&self, payload_n: f64) -> Result<f64, SimError> {
        let p = hover_power(&self.uam_spec, payload_n)?;
        Ok(energy_for_step(p.total_w(), self.config.step_duration_s)?)
    }

    /// Per-step cruise energy at the given payload, kWh.
    pub fn cruise_step_kwh(&self, payload_n: f64) -> Result<f64, SimError> {
        let p = cruise_power(&self.uam_spec, self.uam_spec.flight_speed_m_s, payload_n)?;
        Ok(energy_for_step(p.total_w(), self.config.step_duration_s)?)
    }

    /// An agent is battery-critical when it could not cruise one more step
    /// and then land (one hover-power step) on what remains.
    pub fn battery_critical(&self, agent: usize) -> Result<bool, SimError> {
        let payload = self.payload_n(agent);
        let needed = self.cruise_step_kwh(payload)? + self.hover_step_kwh(payload)?;
        Ok(self.agents[agent].battery.energy_kwh < needed)
    }

    /// Legal-action mask for one agent.
    ///
    /// Landed: hover (= stay parked and charge) always; takeoff unless
    /// battery-critical. Airborne: moves that stay inside the map, hover,
    /// and landing when a vertiport is within the cell radius; a
    /// battery-critical airborne agent is restricted to landing, unless no
    /// vertiport is in range, in which case the normal airborne set applies
    /// (it keeps flying; the battery floors at zero).
    pub fn legal_actions(&self, agent: usize) -> Result<[bool; NUM_ACTIONS], SimError> {
        if agent >= self.agents.len() {
            return Err(SimError::contract(format!("agent {agent} out of range")));
        }
        let critical = self.battery_critical(agent)?;
        let a = &self.agents[agent];
        let mut mask = [false; NUM_ACTIONS];
        match a.mode {
            FlightMode::Landed { .. } => {
                mask[Action::Hover.index()] = true;
                mask[Action::Takeoff.index()] = !critical;
            }
            FlightMode::Airborne => {
                let step_m = self.uam_spec.flight_speed_m_s * self.config.step_duration_s;
                let half = self.config.half_extent_m;
                let can_land = self.vertiport_in_range(agent).is_some();
                if critical && can_land {
                    mask[Action::Land.index()] = true;
                } else {
                    mask[Action::MoveXPlus.index()] = (a.position_m[0] + step_m).abs() <= half;
                    mask[Action::MoveXMinus.index()] = (a.position_m[0] - step_m).abs() <= half;
                    mask[Action::MoveYPlus.index()] = (a.position_m[1] + step_m).abs() <= half;
                    mask[Action::MoveYMinus.index()] = (a.position_m[1] - step_m).abs() <= half;
                    mask[Action::Hover.index()] = true;
                    mask[Action::Land.index()] = can_land;
                }
            }
        }
        Ok(mask)
    }

    /// Execute one agent's action: movement, mode changes, and battery flow.
    /// Boarding/alighting and link updates happen later in the step.
    pub fn apply_action(
        &mut self,
        agent: usize,
        action: Action,
    ) -> Result<AgentStepEvents, SimError> {
        let mask = self.legal_actions(agent)?;
        if !mask[action.index()] {
            return Err(SimError::contract(format!(
                "illegal action {} for agent {agent} at step {}",
                action.name(),
                self.clock
            )));
        }

        let payload = self.payload_n(agent);
        let hover_kwh = self.hover_step_kwh(payload)?;
        let cruise_kwh = self.cruise_step_kwh(payload)?;
        let step_m = self.uam_spec.flight_speed_m_s * self.config.step_duration_s;

        let mut events = AgentStepEvents::new(agent);
        events.action = action;
        events.hover_step_kwh = hover_kwh;
        events.cruise_step_kwh = cruise_kwh;
        events.energy_before_kwh = self.agents[agent].battery.energy_kwh;

        let landed = self.agents[agent].is_landed();
        match action {
            Action::MoveXPlus | Action::MoveXMinus | Action::MoveYPlus | Action::MoveYMinus => {
                let (axis, sign) = match action {
                    Action::MoveXPlus => (0, 1.0),
                    Action::MoveXMinus => (0, -1.0),
                    Action::MoveYPlus => (1, 1.0),
                    _ => (1, -1.0),
                };
                self.agents[agent].position_m[axis] += sign * step_m;
                events.energy_demand_kwh = cruise_kwh;
                events.move_action = true;
            }
            Action::Hover if landed => {
                // Stay parked and charge.
                let a = &mut self.agents[agent];
                a.battery = charge(a.battery, &self.battery_spec, self.config.step_duration_s)?;
            }
            Action::Hover => {
                events.energy_demand_kwh = hover_kwh;
                events.vertical_action = true;
            }
            Action::Takeoff => {
                let a = &mut self.agents[agent];
                a.mode = FlightMode::Airborne;
                a.position_m[2] = self.config.cruise_altitude_m;
                events.energy_demand_kwh = hover_kwh;
                events.vertical_action = true;
            }
            Action::Land => {
                let target = self
                    .vertiport_in_range(agent)
                    .expect("legality check guarantees a vertiport in range");
                let (vx, vy) = self.vertiports[target].position_m;
                let a = &mut self.agents[agent];
                a.mode = FlightMode::Landed { vertiport: target };
                a.position_m = [vx, vy, 0.0];
                events.energy_demand_kwh = hover_kwh;
                events.vertical_action = true;
                events.landed_at = Some(target);
            }
        }

        if events.energy_demand_kwh > 0.0 {
            let outcome = discharge(self.agents[agent].battery, events.energy_demand_kwh)?;
            self.agents[agent].battery = outcome.state;
            events.depleted = outcome.depleted;
        }
        events.position_m = self.agents[agent].position_m;
        Ok(events)
    }

    /// Move every passenger whose request time has arrived into the waiting
    /// pool.
    pub fn spawn_requests(&mut self) {
        for p in &mut self.passengers {
            if p.status == PassengerStatus::Dormant && p.request_step <= self.clock {
                p.status = PassengerStatus::Waiting;
            }
        }
    }

    /// Break stale links, then link waiting passengers to the nearest
    /// in-range agent with free capacity.
    ///
    /// A link breaks when its agent leaves the cell radius of the
    /// passenger's origin vertiport before pickup; onboard passengers keep
    /// their links. Waiting passengers are served in request order (ties by
    /// id); contested agents go to the nearest, ties to the lowest agent id.
    /// Returns (links_made, links_broken) as (agent, passenger) pairs.
    pub fn update_links(&mut self) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
        let mut broken = Vec::new();
        for pid in 0..self.passengers.len() {
            if let PassengerStatus::Linked { agent } = self.passengers[pid].status {
                let origin = self.passengers[pid].origin;
                let d = self.horizontal_distance(&self.agents[agent].position_m, origin);
                if d > self.vertiports[origin].cell_radius_m {
                    self.passengers[pid].status = PassengerStatus::Waiting;
                    self.agents[agent].links.retain(|l| *l != pid);
                    broken.push((agent, pid));
                }
            }
        }

        let mut waiting: Vec<usize> = self
            .passengers
            .iter()
            .filter(|p| p.status == PassengerStatus::Waiting)
            .map(|p| p.id)
            .collect();
        waiting.sort_by_key(|pid| (self.passengers[*pid].request_step, *pid));

        let mut made = Vec::new();
        for pid in waiting {
            let origin = self.passengers[pid].origin;
            let radius = self.vertiports[origin].cell_radius_m;
            let mut best: Option<(f64, usize)> = None;
            for a in &self.agents {
                if a.free_capacity() == 0 {
                    continue;
                }
                let d = self.horizontal_distance(&a.position_m, origin);
                if d <= radius {
                    // Strictly-closer wins; equal distance keeps the lower id.
                    if best.map_or(true, |(bd, _)| d < bd) {
                        best = Some((d, a.id));
                    }
                }
            }
            if let Some((_, agent)) = best {
                self.passengers[pid].status = PassengerStatus::Linked { agent };
                self.agents[agent].links.push(pid);
                made.push((agent, pid));
            }
        }
        (made, broken)
    }

    /// For every landed agent: deliver onboard passengers whose destination
    /// is here, then board linked passengers waiting here (lowest seat index
    /// first, passengers in request order, ties by id). Returns (pickups,
    /// dropoffs) as (agent, passenger) pairs.
    pub fn board_and_alight(&mut self) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
        let mut pickups = Vec::new();
        let mut dropoffs = Vec::new();

        for aid in 0..self.agents.len() {
            let vertiport = match self.agents[aid].mode {
                FlightMode::Landed { vertiport } => vertiport,
                FlightMode::Airborne => continue,
            };

            // Alight first: frees seats for this step's boardings.
            for seat in 0..self.agents[aid].seats.len() {
                if let Some(pid) = self.agents[aid].seats[seat] {
                    if self.passengers[pid].destination == vertiport {
                        self.agents[aid].seats[seat] = None;
                        self.agents[aid].seat_waits_min[seat] = 0.0;
                        self.passengers[pid].status = PassengerStatus::Delivered;
                        self.passengers[pid].delivery_step = Some(self.clock);
                        dropoffs.push((aid, pid));
                    }
                }
            }

            // Board linked passengers whose origin is this vertiport.
            let mut candidates: Vec<usize> = self.agents[aid]
                .links
                .iter()
                .copied()
                .filter(|pid| self.passengers[*pid].origin == vertiport)
                .collect();
            candidates.sort_by_key(|pid| (self.passengers[*pid].request_step, *pid));

            for pid in candidates {
                let seat = match self.agents[aid].seats.iter().position(|s| s.is_none()) {
                    Some(seat) => seat,
                    None => break,
                };
                self.agents[aid].seats[seat] = Some(pid);
                self.agents[aid].links.retain(|l| *l != pid);
                // Seat wait starts from the time already spent waiting.
                self.agents[aid].seat_waits_min[seat] = self.waiting_time_min(pid);
                self.passengers[pid].status = PassengerStatus::Onboard { agent: aid, seat };
                pickups.push((aid, pid));
            }
        }
        (pickups, dropoffs)
    }

    /// Minutes from request to delivery (frozen), to now (in service), or 0
    /// (dormant).
    pub fn waiting_time_min(&self, passenger: usize) -> f64 {
        let p = &self.passengers[passenger];
        let per_step_min = self.config.step_duration_s / 60.0;
        match p.status {
            PassengerStatus::Dormant => 0.0,
            PassengerStatus::Delivered => {
                let delivered = p.delivery_step.expect("delivered passengers have a time");
                (delivered.saturating_sub(p.request_step)) as f64 * per_step_min
            }
            _ => (self.clock.saturating_sub(p.request_step)) as f64 * per_step_min,
        }
    }

    /// Advance the world by one joint action.
    ///
    /// Order: apply all actions (ascending agent id), spawn requests, update
    /// links, board/alight, accumulate onboard waits, tick the clock.
    pub fn step(&mut self, joint_action: &[Action]) -> Result<StepOutcome, SimError> {
        if self.done() {
            return Err(SimError::EpisodeDone { clock: self.clock });
        }
        if joint_action.len() != self.agents.len() {
            return Err(SimError::contract(format!(
                "joint action has {} entries for {} agents",
                joint_action.len(),
                self.agents.len()
            )));
        }

        let mut events: Vec<AgentStepEvents> = Vec::with_capacity(self.agents.len());
        for (agent, action) in joint_action.iter().enumerate() {
            events.push(self.apply_action(agent, *action)?);
        }

        self.spawn_requests();
        let (made, broken) = self.update_links();
        let (pickups, dropoffs) = self.board_and_alight();

        for (agent, pid) in made {
            events[agent].links_made.push(pid);
        }
        for (agent, pid) in broken {
            events[agent].links_broken.push(pid);
        }
        for (agent, pid) in pickups {
            events[agent].pickups.push(pid);
        }
        for (agent, pid) in dropoffs {
            events[agent].dropoffs.push(pid);
        }

        let per_step_min = self.config.step_duration_s / 60.0;
        for a in &mut self.agents {
            for seat in 0..a.seats.len() {
                if a.seats[seat].is_some() {
                    a.seat_waits_min[seat] += per_step_min;
                }
            }
        }

        self.clock += 1;
        Ok(StepOutcome {
            events,
            done: self.done(),
        })
    }
}

/// Audit the structural invariants of a state; returns the first violation.
pub fn check_invariants(state: &SimState) -> Result<(), String> {
    let n = state.config.num_passengers;
    let statuses = state.passengers.len();
    if statuses != n {
        return Err(format!("passenger count {statuses} != N {n}"));
    }

    for a in &state.agents {
        let occupied = a.occupied_seats();
        if occupied + a.links.len() > a.seats.len() {
            return Err(format!(
                "agent {} exceeds seat capacity: {} onboard + {} links > {}",
                a.id,
                occupied,
                a.links.len(),
                a.seats.len()
            ));
        }
        let e = a.battery.energy_kwh;
        if !(0.0..=state.battery_spec.capacity_kwh).contains(&e) {
            return Err(format!("agent {} battery {e} outside [0, capacity]", a.id));
        }
        match a.mode {
            FlightMode::Landed { vertiport } => {
                let (vx, vy) = state.vertiports[vertiport].position_m;
                if a.position_m[2] != 0.0 || a.position_m[0] != vx || a.position_m[1] != vy {
                    return Err(format!(
                        "agent {} landed but not at vertiport {vertiport}",
                        a.id
                    ));
                }
            }
            FlightMode::Airborne => {
                if a.position_m[2] != state.config.cruise_altitude_m {
                    return Err(format!("agent {} airborne but z = {}", a.id, a.position_m[2]));
                }
            }
        }
        if a.position_m[0].abs() > state.config.half_extent_m
            || a.position_m[1].abs() > state.config.half_extent_m
        {
            return Err(format!("agent {} outside map bounds", a.id));
        }
    }

    for p in &state.passengers {
        if p.origin == p.destination {
            return Err(format!("passenger {} has origin == destination", p.id));
        }
        if let Some(delivered) = p.delivery_step {
            if delivered < p.request_step {
                return Err(format!("passenger {} delivered before requesting", p.id));
            }
        }
        match p.status {
            PassengerStatus::Onboard { agent, seat } => {
                if state.agents[agent].seats[seat] != Some(p.id) {
                    return Err(format!(
                        "passenger {} claims seat {seat} of agent {agent} but the seat disagrees",
                        p.id
                    ));
                }
            }
            PassengerStatus::Linked { agent } => {
                if !state.agents[agent].links.contains(&p.id) {
                    return Err(format!(
                        "passenger {} linked to agent {agent} but not in its link set",
                        p.id
                    ));
                }
            }
            _ => {}
        }
    }
    Ok(())
}
