//! CSV ingestion and emission.
//!
//! Schedule CSV columns: `flight_id, airline, terminal, equipment_class,
//! sched_arr, sched_dep, act_arr, act_dep, current_gate`. Time cells are
//! integer minutes or ISO-8601 timestamps (converted to minutes since the
//! Unix epoch); an empty cell means absent. Gates CSV columns: `gate_id,
//! terminal, airlines, equipment` with semicolon-separated lists.

use std::collections::BTreeSet;
use std::path::Path;

use chrono::NaiveDateTime;

use super::{EquipmentClass, Flight, Gate, Schedule, ScheduleError};
use crate::Minutes;

const SCHEDULE_HEADER: [&str; 9] = [
    "flight_id",
    "airline",
    "terminal",
    "equipment_class",
    "sched_arr",
    "sched_dep",
    "act_arr",
    "act_dep",
    "current_gate",
];

/// Loads a schedule CSV plus a gates CSV into a [`Schedule`].
///
/// The horizon is the tight cover of all flight times. Duplicate flight ids
/// and time-ordering violations are rejected.
pub fn load_schedule(
    schedule_path: &Path,
    gates_path: Option<&Path>,
) -> Result<Schedule, ScheduleError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(schedule_path)
        .map_err(|e| ScheduleError::Csv {
            row: 0,
            msg: e.to_string(),
        })?;

    let mut flights = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 2; // 1-based, after the header
        let record = record.map_err(|e| ScheduleError::Csv {
            row,
            msg: e.to_string(),
        })?;
        let field = |i: usize| -> Result<&str, ScheduleError> {
            record.get(i).ok_or(ScheduleError::Csv {
                row,
                msg: format!("missing column {}", SCHEDULE_HEADER[i]),
            })
        };
        let flight = Flight {
            id: field(0)?.to_string(),
            airline: field(1)?.to_string(),
            terminal: field(2)?.to_string(),
            equipment_class: EquipmentClass::parse(field(3)?)
                .map_err(|e| at_row(e, row))?,
            sched_arr: parse_time(field(4)?).map_err(|e| at_row(e, row))?,
            sched_dep: parse_time(field(5)?).map_err(|e| at_row(e, row))?,
            act_arr: parse_time(field(6)?).map_err(|e| at_row(e, row))?,
            act_dep: parse_time(field(7)?).map_err(|e| at_row(e, row))?,
            current_gate: match field(8)? {
                "" => None,
                g => Some(g.to_string()),
            },
        };
        flight.validate()?;
        flights.push(flight);
    }

    let gates = match gates_path {
        Some(p) => load_gates(p)?,
        None => Vec::new(),
    };

    let horizon = tight_horizon(&flights);
    let schedule = Schedule {
        flights,
        gates,
        horizon,
    };
    schedule.validate()?;
    Ok(schedule)
}

/// Writes the schedule rows back out in the canonical integer-minute format.
pub fn write_schedule(schedule: &Schedule, path: &Path) -> Result<(), ScheduleError> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| ScheduleError::Csv {
        row: 0,
        msg: e.to_string(),
    })?;
    writer
        .write_record(SCHEDULE_HEADER)
        .map_err(csv_write_err)?;
    for f in &schedule.flights {
        writer
            .write_record([
                f.id.as_str(),
                f.airline.as_str(),
                f.terminal.as_str(),
                f.equipment_class.as_str(),
                &fmt_time(f.sched_arr),
                &fmt_time(f.sched_dep),
                &fmt_time(f.act_arr),
                &fmt_time(f.act_dep),
                f.current_gate.as_deref().unwrap_or(""),
            ])
            .map_err(csv_write_err)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn load_gates(path: &Path) -> Result<Vec<Gate>, ScheduleError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| ScheduleError::Csv {
            row: 0,
            msg: e.to_string(),
        })?;
    let mut gates = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 2;
        let record = record.map_err(|e| ScheduleError::Csv {
            row,
            msg: e.to_string(),
        })?;
        let get = |i: usize| record.get(i).unwrap_or("").to_string();
        let airlines: BTreeSet<String> = get(2)
            .split(';')
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect();
        let equipment: BTreeSet<EquipmentClass> = get(3)
            .split(';')
            .filter(|s| !s.is_empty())
            .map(EquipmentClass::parse)
            .collect::<Result<_, _>>()
            .map_err(|e| at_row(e, row))?;
        if airlines.is_empty() || equipment.is_empty() {
            return Err(ScheduleError::Csv {
                row,
                msg: "gate compatibility sets must be non-empty".into(),
            });
        }
        gates.push(Gate {
            id: get(0),
            terminal: get(1),
            compatible_airlines: airlines,
            compatible_equipment: equipment,
        });
    }
    Ok(gates)
}

pub fn write_gates(gates: &[Gate], path: &Path) -> Result<(), ScheduleError> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| ScheduleError::Csv {
        row: 0,
        msg: e.to_string(),
    })?;
    writer
        .write_record(["gate_id", "terminal", "airlines", "equipment"])
        .map_err(csv_write_err)?;
    for g in gates {
        let airlines = g
            .compatible_airlines
            .iter()
            .cloned()
            .collect::<Vec<_>>()
            .join(";");
        let equipment = g
            .compatible_equipment
            .iter()
            .map(|e| e.as_str())
            .collect::<Vec<_>>()
            .join(";");
        writer
            .write_record([g.id.as_str(), g.terminal.as_str(), &airlines, &equipment])
            .map_err(csv_write_err)?;
    }
    writer.flush()?;
    Ok(())
}

fn csv_write_err(e: csv::Error) -> ScheduleError {
    ScheduleError::Csv {
        row: 0,
        msg: e.to_string(),
    }
}

fn at_row(err: ScheduleError, row: usize) -> ScheduleError {
    match err {
        ScheduleError::BadEquipmentClass(s) => ScheduleError::Csv {
            row,
            msg: format!("unknown equipment class {s:?}"),
        },
        ScheduleError::BadTimestamp(s) => ScheduleError::Csv {
            row,
            msg: format!("unparseable timestamp {s:?}"),
        },
        other => other,
    }
}

/// Parses an empty cell, integer minutes, or an ISO-8601 timestamp.
fn parse_time(cell: &str) -> Result<Option<Minutes>, ScheduleError> {
    if cell.is_empty() {
        return Ok(None);
    }
    if let Ok(m) = cell.parse::<i64>() {
        return Ok(Some(m));
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M:%S"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(cell, fmt) {
            return Ok(Some(dt.and_utc().timestamp() / 60));
        }
    }
    Err(ScheduleError::BadTimestamp(cell.to_string()))
}

fn fmt_time(t: Option<Minutes>) -> String {
    t.map(|m| m.to_string()).unwrap_or_default()
}

fn tight_horizon(flights: &[Flight]) -> (Minutes, Minutes) {
    let mut lo = Minutes::MAX;
    let mut hi = Minutes::MIN;
    for f in flights {
        for t in [f.sched_arr, f.sched_dep, f.act_arr, f.act_dep]
            .into_iter()
            .flatten()
        {
            lo = lo.min(t);
            hi = hi.max(t);
        }
    }
    if lo > hi {
        (0, 0)
    } else {
        (lo, hi)
    }
}
