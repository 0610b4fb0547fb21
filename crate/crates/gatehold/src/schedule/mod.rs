//! Domain types, CSV ingestion, flight pairing, and synthetic schedules.

mod io;
mod pairing;
mod synth;

pub use io::{load_gates, load_schedule, write_gates, write_schedule};
pub use pairing::pair_flights;
pub use synth::{gen_synthetic, GeneratorConfig, TerminalSpec};

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Minutes;

/// Aircraft equipment class; gates may serve a subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EquipmentClass {
    Small,
    Large,
}

impl EquipmentClass {
    pub fn as_str(self) -> &'static str {
        match self {
            EquipmentClass::Small => "small",
            EquipmentClass::Large => "large",
        }
    }

    pub fn parse(s: &str) -> Result<Self, ScheduleError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "small" => Ok(EquipmentClass::Small),
            "large" => Ok(EquipmentClass::Large),
            other => Err(ScheduleError::BadEquipmentClass(other.to_string())),
        }
    }
}

/// One gate use: a paired turn (arrival + departure) or an unpaired leg.
///
/// Times are minutes since the schedule epoch. A turn has both scheduled
/// times; an arrival-only or departure-only leg has exactly one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flight {
    pub id: String,
    pub airline: String,
    pub terminal: String,
    pub equipment_class: EquipmentClass,
    pub sched_arr: Option<Minutes>,
    pub sched_dep: Option<Minutes>,
    pub act_arr: Option<Minutes>,
    pub act_dep: Option<Minutes>,
    /// Gate in the current (baseline) assignment feed, when known.
    pub current_gate: Option<String>,
}

impl Flight {
    pub fn is_turn(&self) -> bool {
        self.sched_arr.is_some() && self.sched_dep.is_some()
    }

    pub fn is_arrival_leg(&self) -> bool {
        self.sched_arr.is_some() && self.sched_dep.is_none()
    }

    pub fn is_departure_leg(&self) -> bool {
        self.sched_arr.is_none() && self.sched_dep.is_some()
    }

    /// Checks the per-flight invariants.
    pub fn validate(&self) -> Result<(), ScheduleError> {
        if self.sched_arr.is_none() && self.sched_dep.is_none() {
            return Err(ScheduleError::NoTimes(self.id.clone()));
        }
        if let (Some(arr), Some(dep)) = (self.sched_arr, self.sched_dep) {
            if arr >= dep {
                return Err(ScheduleError::ArrivalAfterDeparture {
                    flight: self.id.clone(),
                    arr,
                    dep,
                });
            }
        }
        if let (Some(arr), Some(dep)) = (self.act_arr, self.act_dep) {
            if arr >= dep {
                return Err(ScheduleError::ArrivalAfterDeparture {
                    flight: self.id.clone(),
                    arr,
                    dep,
                });
            }
        }
        Ok(())
    }
}

/// A gate with its airline and equipment compatibility sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub id: String,
    pub terminal: String,
    pub compatible_airlines: BTreeSet<String>,
    pub compatible_equipment: BTreeSet<EquipmentClass>,
}

impl Gate {
    pub fn accepts(&self, flight: &Flight) -> bool {
        self.compatible_airlines.contains(&flight.airline)
            && self.compatible_equipment.contains(&flight.equipment_class)
    }
}

/// A flight's occupancy window at a gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateOccupancy {
    pub t_in: Minutes,
    pub t_out: Minutes,
}

impl GateOccupancy {
    pub fn new(t_in: Minutes, t_out: Minutes) -> Self {
        assert!(t_in < t_out, "occupancy window must have t_in < t_out");
        Self { t_in, t_out }
    }
}

/// A set of flights and gates over a fixed horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub flights: Vec<Flight>,
    pub gates: Vec<Gate>,
    pub horizon: (Minutes, Minutes),
}

impl Schedule {
    /// Validates flight invariants, id uniqueness, and horizon containment.
    pub fn validate(&self) -> Result<(), ScheduleError> {
        let mut seen = BTreeSet::new();
        for f in &self.flights {
            f.validate()?;
            if !seen.insert(f.id.as_str()) {
                return Err(ScheduleError::DuplicateFlightId(f.id.clone()));
            }
            for t in [f.sched_arr, f.sched_dep, f.act_arr, f.act_dep]
                .into_iter()
                .flatten()
            {
                if t < self.horizon.0 || t > self.horizon.1 {
                    return Err(ScheduleError::OutsideHorizon {
                        flight: f.id.clone(),
                        time: t,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn gate(&self, id: &str) -> Option<&Gate> {
        self.gates.iter().find(|g| g.id == id)
    }
}

#[derive(Debug, Error)]
pub enum ScheduleError {
    #[error("csv error at row {row}: {msg}")]
    Csv { row: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("flight {flight}: arrival after departure ({arr} >= {dep})")]
    ArrivalAfterDeparture {
        flight: String,
        arr: Minutes,
        dep: Minutes,
    },
    #[error("flight {0} has neither arrival nor departure time")]
    NoTimes(String),
    #[error("duplicate flight id {0}")]
    DuplicateFlightId(String),
    #[error("flight {flight}: time {time} outside horizon")]
    OutsideHorizon { flight: String, time: Minutes },
    #[error("unknown equipment class {0:?}")]
    BadEquipmentClass(String),
    #[error("unparseable timestamp {0:?}")]
    BadTimestamp(String),
    #[error("infeasible generator config: {0}")]
    InfeasibleConfig(String),
}
