//! Robust gate assignment.
//!
//! Flights occupy scheduled windows at gates. A feasible assignment maps
//! every flight to one compatible gate with at least `t_buff` minutes
//! between consecutive uses. The objective charges every same-gate pair
//! `A * B^sep`, the fitted expected overlap at their separation, and is
//! minimized by Tabu Search with an exhaustive-enumeration oracle for
//! small instances.

mod brute;
mod moves;
mod tabu;

pub use brute::brute_force;
pub use moves::{insert_move, interval_exchange_move};
pub use tabu::{greedy_initial, tabu_search, ObjectivePoint, TabuConfig, TabuResult};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::schedule::{Flight, Gate, GateOccupancy};
use crate::{Minutes, Real};

/// Occupancy window assumed for unpaired legs (the aircraft is towed on or
/// off the gate outside it).
pub const DEFAULT_UNPAIRED_OCCUPANCY_MIN: Minutes = 45;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct InstanceParams {
    /// Disturbance scale: expected overlap at zero separation, minutes.
    pub a: Real,
    /// Disturbance decay per minute of separation.
    pub b: Real,
    /// Minimum required separation between consecutive same-gate flights.
    pub t_buff: Minutes,
    pub unpaired_occupancy_min: Minutes,
}

impl Default for InstanceParams {
    fn default() -> Self {
        Self {
            a: 8.0,
            b: 0.97,
            t_buff: 0,
            unpaired_occupancy_min: DEFAULT_UNPAIRED_OCCUPANCY_MIN,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct FlightSlot {
    pub id: String,
    pub window: GateOccupancy,
    /// Per-gate compatibility, indexed like `ProblemInstance::gates`.
    pub compatible: Vec<bool>,
}

/// The assignment problem: flights as scheduled occupancy windows, gates
/// with compatibility, the separation buffer, and the disturbance constants.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub(crate) flights: Vec<FlightSlot>,
    pub(crate) gate_ids: Vec<String>,
    pub(crate) t_buff: Minutes,
    a: Real,
    b: Real,
    horizon: (Minutes, Minutes),
}

impl ProblemInstance {
    /// Builds an instance from scheduled times. Flights and gates are
    /// ordered by id internally so tie-breaking follows ids.
    pub fn new(
        flights: &[Flight],
        gates: &[Gate],
        params: InstanceParams,
    ) -> Result<Self, AssignError> {
        assert!(params.t_buff >= 0, "t_buff must be non-negative");
        assert!(
            params.a >= 0.0 && params.b > 0.0 && params.b <= 1.0,
            "disturbance constants out of range"
        );
        let mut gates: Vec<&Gate> = gates.iter().collect();
        gates.sort_by(|x, y| x.id.cmp(&y.id));
        let gate_ids: Vec<String> = gates.iter().map(|g| g.id.clone()).collect();

        let mut slots = Vec::with_capacity(flights.len());
        for flight in flights {
            let window = occupancy_window(flight, params.unpaired_occupancy_min)?;
            let compatible: Vec<bool> = gates.iter().map(|g| g.accepts(flight)).collect();
            if !compatible.iter().any(|&c| c) {
                return Err(AssignError::NoCompatibleGate(flight.id.clone()));
            }
            slots.push(FlightSlot {
                id: flight.id.clone(),
                window,
                compatible,
            });
        }
        slots.sort_by(|x, y| x.id.cmp(&y.id));

        let lo = slots.iter().map(|s| s.window.t_in).min().unwrap_or(0);
        let hi = slots.iter().map(|s| s.window.t_out).max().unwrap_or(0);
        Ok(Self {
            flights: slots,
            gate_ids,
            t_buff: params.t_buff,
            a: params.a,
            b: params.b,
            horizon: (lo, hi),
        })
    }

    pub fn flight_count(&self) -> usize {
        self.flights.len()
    }

    pub fn gate_count(&self) -> usize {
        self.gate_ids.len()
    }

    pub fn flight_id(&self, idx: usize) -> &str {
        &self.flights[idx].id
    }

    pub fn gate_id(&self, idx: usize) -> &str {
        &self.gate_ids[idx]
    }

    pub fn flight_index(&self, id: &str) -> Option<usize> {
        self.flights.iter().position(|f| f.id == id)
    }

    pub fn gate_index(&self, id: &str) -> Option<usize> {
        self.gate_ids.iter().position(|g| g == id)
    }

    pub fn window(&self, flight: usize) -> GateOccupancy {
        self.flights[flight].window
    }

    pub fn is_compatible(&self, flight: usize, gate: usize) -> bool {
        self.flights[flight].compatible[gate]
    }

    pub fn horizon(&self) -> (Minutes, Minutes) {
        self.horizon
    }

    pub fn disturbance(&self) -> (Real, Real) {
        (self.a, self.b)
    }

    /// Expected-overlap charge for a same-gate pair at this separation.
    pub fn pair_cost(&self, sep: Minutes) -> Real {
        self.a * self.b.powi(sep.max(0).min(i64::from(i32::MAX)) as i32)
    }

    /// Separation between two windows: later gate-in minus earlier gate-out.
    pub fn separation(&self, f1: usize, f2: usize) -> Minutes {
        let (w1, w2) = (self.flights[f1].window, self.flights[f2].window);
        if w1.t_in <= w2.t_in {
            w2.t_in - w1.t_out
        } else {
            w1.t_in - w2.t_out
        }
    }

    /// Two windows violate the buffer when each ends more than `-t_buff`
    /// after the other begins, i.e. the separation is below `t_buff`.
    pub fn windows_conflict(&self, f1: usize, f2: usize) -> bool {
        let (w1, w2) = (self.flights[f1].window, self.flights[f2].window);
        (w1.t_out - w2.t_in + self.t_buff) > 0 && (w2.t_out - w1.t_in + self.t_buff) > 0
    }
}

fn occupancy_window(flight: &Flight, unpaired_occ: Minutes) -> Result<GateOccupancy, AssignError> {
    match (flight.sched_arr, flight.sched_dep) {
        (Some(arr), Some(dep)) => Ok(GateOccupancy::new(arr, dep)),
        (Some(arr), None) => Ok(GateOccupancy::new(arr, arr + unpaired_occ.max(1))),
        (None, Some(dep)) => Ok(GateOccupancy::new(dep - unpaired_occ.max(1), dep)),
        (None, None) => Err(AssignError::MissingSchedTimes(flight.id.clone())),
    }
}

/// A flight -> gate mapping with its cached objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub(crate) gate_of: Vec<usize>,
    objective: Real,
}

impl Assignment {
    /// Validates feasibility and caches the objective.
    pub fn new(instance: &ProblemInstance, gate_of: Vec<usize>) -> Result<Self, AssignError> {
        let violations = check_feasible(instance, &gate_of);
        if !violations.is_empty() {
            return Err(AssignError::Infeasible(violations));
        }
        let objective = objective_unchecked(instance, &gate_of);
        Ok(Self { gate_of, objective })
    }

    /// Builds from a flight-id -> gate-id map covering every flight.
    pub fn from_gate_map(
        instance: &ProblemInstance,
        map: &BTreeMap<String, String>,
    ) -> Result<Self, AssignError> {
        let mut gate_of = vec![usize::MAX; instance.flight_count()];
        for (idx, slot) in instance.flights.iter().enumerate() {
            let gate_id = map
                .get(&slot.id)
                .ok_or_else(|| AssignError::MissingAssignment(slot.id.clone()))?;
            gate_of[idx] = instance
                .gate_index(gate_id)
                .ok_or_else(|| AssignError::UnknownGate(gate_id.clone()))?;
        }
        Self::new(instance, gate_of)
    }

    pub fn objective_value(&self) -> Real {
        self.objective
    }

    pub fn gate_of(&self, flight: usize) -> usize {
        self.gate_of[flight]
    }

    /// Flight-id -> gate-id view, ordered by flight id.
    pub fn to_gate_map(&self, instance: &ProblemInstance) -> BTreeMap<String, String> {
        self.gate_of
            .iter()
            .enumerate()
            .map(|(f, &g)| {
                (
                    instance.flight_id(f).to_string(),
                    instance.gate_id(g).to_string(),
                )
            })
            .collect()
    }

    pub(crate) fn with_objective(gate_of: Vec<usize>, objective: Real) -> Self {
        Self { gate_of, objective }
    }
}

/// A constraint violation, reported as data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    /// Two same-gate flights closer than the buffer.
    Separation {
        first: String,
        second: String,
        gate: String,
    },
    Incompatible {
        flight: String,
        gate: String,
    },
    Unassigned {
        flight: String,
    },
}

/// Checks coverage, compatibility, and the pairwise buffer condition for
/// every same-gate pair. An empty result means feasible.
pub fn check_feasible(instance: &ProblemInstance, gate_of: &[usize]) -> Vec<Violation> {
    let mut violations = Vec::new();
    if gate_of.len() != instance.flight_count() {
        for idx in gate_of.len()..instance.flight_count() {
            violations.push(Violation::Unassigned {
                flight: instance.flight_id(idx).to_string(),
            });
        }
    }
    let mut by_gate: Vec<Vec<usize>> = vec![Vec::new(); instance.gate_count()];
    for (f, &g) in gate_of.iter().enumerate() {
        if g >= instance.gate_count() {
            violations.push(Violation::Unassigned {
                flight: instance.flight_id(f).to_string(),
            });
            continue;
        }
        if !instance.is_compatible(f, g) {
            violations.push(Violation::Incompatible {
                flight: instance.flight_id(f).to_string(),
                gate: instance.gate_id(g).to_string(),
            });
        }
        by_gate[g].push(f);
    }
    for (g, occupants) in by_gate.iter().enumerate() {
        for (i, &f1) in occupants.iter().enumerate() {
            for &f2 in &occupants[i + 1..] {
                if instance.windows_conflict(f1, f2) {
                    let (first, second) =
                        if instance.window(f1).t_in <= instance.window(f2).t_in {
                            (f1, f2)
                        } else {
                            (f2, f1)
                        };
                    violations.push(Violation::Separation {
                        first: instance.flight_id(first).to_string(),
                        second: instance.flight_id(second).to_string(),
                        gate: instance.gate_id(g).to_string(),
                    });
                }
            }
        }
    }
    violations
}

/// Total expected overlap of a feasible assignment.
pub fn objective(instance: &ProblemInstance, gate_of: &[usize]) -> Result<Real, AssignError> {
    let violations = check_feasible(instance, gate_of);
    if !violations.is_empty() {
        return Err(AssignError::Infeasible(violations));
    }
    Ok(objective_unchecked(instance, gate_of))
}

pub(crate) fn objective_unchecked(instance: &ProblemInstance, gate_of: &[usize]) -> Real {
    let mut by_gate: Vec<Vec<usize>> = vec![Vec::new(); instance.gate_count()];
    for (f, &g) in gate_of.iter().enumerate() {
        by_gate[g].push(f);
    }
    let mut total = 0.0;
    for occupants in &by_gate {
        for (i, &f1) in occupants.iter().enumerate() {
            for &f2 in &occupants[i + 1..] {
                total += instance.pair_cost(instance.separation(f1, f2));
            }
        }
    }
    total
}

/// Mean/σ of consecutive same-gate separations (scheduled times).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparationStats {
    pub mean_min: Real,
    pub std_min: Real,
    pub pairs: usize,
}

pub fn separation_stats(instance: &ProblemInstance, assignment: &Assignment) -> SeparationStats {
    let mut by_gate: Vec<Vec<usize>> = vec![Vec::new(); instance.gate_count()];
    for (f, &g) in assignment.gate_of.iter().enumerate() {
        by_gate[g].push(f);
    }
    let mut seps = Vec::new();
    for occupants in by_gate.iter_mut() {
        occupants.sort_by_key(|&f| (instance.window(f).t_in, instance.window(f).t_out));
        for pair in occupants.windows(2) {
            seps.push(
                (instance.window(pair[1]).t_in - instance.window(pair[0]).t_out) as Real,
            );
        }
    }
    SeparationStats {
        mean_min: crate::scalar::mean(&seps),
        std_min: crate::scalar::std_dev(&seps),
        pairs: seps.len(),
    }
}

#[derive(Debug, Error)]
pub enum AssignError {
    #[error("flight {0} is not assigned a gate")]
    MissingAssignment(String),
    #[error("unknown gate {0}")]
    UnknownGate(String),
    #[error("flight {0} has no compatible gate")]
    NoCompatibleGate(String),
    #[error("flight {0} has no scheduled times")]
    MissingSchedTimes(String),
    #[error("assignment infeasible: {0:?}")]
    Infeasible(Vec<Violation>),
    #[error("move infeasible: {0}")]
    InfeasibleMove(String),
    #[error("no feasible initial assignment: {0}")]
    NoFeasibleInitial(String),
    #[error("instance too large for enumeration: {gates} gates ^ {flights} flights")]
    TooLarge { flights: usize, gates: usize },
}
