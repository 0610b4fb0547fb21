//! Exhaustive-enumeration oracle for small instances.

use super::{objective_unchecked, Assignment, AssignError, ProblemInstance};
use crate::Real;

const MAX_ENUMERATION: f64 = 1e7;

/// Exact optimum by depth-first enumeration with feasibility filtering and
/// a non-negative-cost bound. Refuses instances beyond `gates^flights = 1e7`.
pub fn brute_force(instance: &ProblemInstance) -> Result<Assignment, AssignError> {
    let flights = instance.flight_count();
    let gates = instance.gate_count();
    if (gates as f64).powi(flights as i32) > MAX_ENUMERATION {
        return Err(AssignError::TooLarge { flights, gates });
    }
    if flights == 0 {
        return Ok(Assignment::with_objective(Vec::new(), 0.0));
    }

    let mut state = Search {
        instance,
        gate_of: vec![usize::MAX; flights],
        occupants: vec![Vec::new(); gates],
        best: None,
    };
    state.descend(0, 0.0);

    match state.best {
        Some((gate_of, objective)) => Ok(Assignment::with_objective(gate_of, objective)),
        None => Err(AssignError::NoFeasibleInitial(
            "no feasible assignment exists".into(),
        )),
    }
}

struct Search<'a> {
    instance: &'a ProblemInstance,
    gate_of: Vec<usize>,
    occupants: Vec<Vec<usize>>,
    best: Option<(Vec<usize>, Real)>,
}

impl Search<'_> {
    fn descend(&mut self, flight: usize, partial: Real) {
        if let Some((_, best)) = &self.best {
            // Pair costs are non-negative, so the partial sum is a bound.
            if partial >= *best {
                return;
            }
        }
        if flight == self.gate_of.len() {
            let exact = objective_unchecked(self.instance, &self.gate_of);
            let better = match &self.best {
                None => true,
                Some((_, best)) => exact < *best,
            };
            if better {
                self.best = Some((self.gate_of.clone(), exact));
            }
            return;
        }
        for gate in 0..self.instance.gate_count() {
            if !self.instance.is_compatible(flight, gate) {
                continue;
            }
            let feasible = self.occupants[gate]
                .iter()
                .all(|&other| !self.instance.windows_conflict(flight, other));
            if !feasible {
                continue;
            }
            let added: Real = self.occupants[gate]
                .iter()
                .map(|&other| {
                    self.instance
                        .pair_cost(self.instance.separation(flight, other))
                })
                .sum();
            self.gate_of[flight] = gate;
            self.occupants[gate].push(flight);
            self.descend(flight + 1, partial + added);
            self.occupants[gate].pop();
            self.gate_of[flight] = usize::MAX;
        }
    }
}
