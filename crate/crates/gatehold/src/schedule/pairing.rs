//! Arrival/departure pairing into turns.
//!
//! A departure is paired with an arrival when both use the same gate in the
//! current assignment, share an equipment class, and no other completed gate
//! visit nests inside their interval. The nested pattern (two arrivals then
//! two departures at one gate) means the outer aircraft was towed off the
//! gate in between, so the outer pair is emitted as separate unpaired legs.
//! Deeper nesting resolves the same way from the innermost pair outward.

use std::collections::BTreeMap;

use super::Flight;

/// Builds the flight-id -> gate-id map from the flights' own
/// `current_gate` fields.
pub fn current_gate_map(flights: &[Flight]) -> BTreeMap<String, String> {
    flights
        .iter()
        .filter_map(|f| f.current_gate.clone().map(|g| (f.id.clone(), g)))
        .collect()
}

/// Merges arrivals and departures into turns plus unpaired legs.
///
/// Every input flight appears in exactly one output element; a merged turn
/// keeps both legs' times and carries the id `"{arrival}+{departure}"`.
pub fn pair_flights(
    arrivals: &[Flight],
    departures: &[Flight],
    current_assignment: &BTreeMap<String, String>,
) -> Vec<Flight> {
    #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
    enum Kind {
        Arr,
        Dep,
    }

    // Per-gate event streams ordered by scheduled time.
    let mut by_gate: BTreeMap<&str, Vec<(i64, Kind, &Flight)>> = BTreeMap::new();
    let mut output: Vec<Flight> = Vec::new();

    for f in arrivals {
        match (current_assignment.get(&f.id), f.sched_arr) {
            (Some(gate), Some(t)) => by_gate.entry(gate).or_default().push((t, Kind::Arr, f)),
            _ => output.push(f.clone()),
        }
    }
    for f in departures {
        match (current_assignment.get(&f.id), f.sched_dep) {
            (Some(gate), Some(t)) => by_gate.entry(gate).or_default().push((t, Kind::Dep, f)),
            _ => output.push(f.clone()),
        }
    }

    for (gate, mut events) in by_gate {
        events.sort_by(|a, b| (a.0, a.1, &a.2.id).cmp(&(b.0, b.1, &b.2.id)));

        // Stack entry: the arrival plus the completed-pair count at push time.
        let mut stack: Vec<(&Flight, usize)> = Vec::new();
        let mut completed_pairs = 0usize;

        for (_, kind, flight) in events {
            match kind {
                Kind::Arr => stack.push((flight, completed_pairs)),
                Kind::Dep => {
                    let top_matches = stack
                        .last()
                        .is_some_and(|(arr, _)| arr.equipment_class == flight.equipment_class);
                    if !top_matches {
                        output.push(flight.clone());
                        continue;
                    }
                    let (arr, pairs_at_push) = stack.pop().unwrap();
                    if completed_pairs > pairs_at_push {
                        // A full visit nests inside: the towed-aircraft case.
                        output.push(arr.clone());
                        output.push(flight.clone());
                    } else {
                        output.push(merge_turn(arr, flight, gate));
                        completed_pairs += 1;
                    }
                }
            }
        }
        for (arr, _) in stack {
            output.push(arr.clone());
        }
    }

    output.sort_by(|a, b| {
        let ka = (a.sched_arr.or(a.sched_dep), &a.id);
        let kb = (b.sched_arr.or(b.sched_dep), &b.id);
        ka.cmp(&kb)
    });
    output
}

fn merge_turn(arr: &Flight, dep: &Flight, gate: &str) -> Flight {
    Flight {
        id: format!("{}+{}", arr.id, dep.id),
        airline: dep.airline.clone(),
        terminal: dep.terminal.clone(),
        equipment_class: dep.equipment_class,
        sched_arr: arr.sched_arr,
        sched_dep: dep.sched_dep,
        act_arr: arr.act_arr,
        act_dep: dep.act_dep,
        current_gate: Some(gate.to_string()),
    }
}
