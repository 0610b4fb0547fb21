//! Neighborhood moves and incremental objective deltas.
//!
//! The objective only couples flights sharing a gate, so a move's delta is
//! the pair terms it removes minus the pair terms it adds. Group moves keep
//! their internal terms, which cancel.

use super::{check_feasible, Assignment, AssignError, ProblemInstance};
use crate::{Minutes, Real};

/// Per-gate occupant lists kept sorted by window start; the solver's
/// incremental view of an assignment.
#[derive(Debug, Clone)]
pub(crate) struct GateLayout {
    pub occupants: Vec<Vec<usize>>,
}

impl GateLayout {
    pub fn new(instance: &ProblemInstance, gate_of: &[usize]) -> Self {
        let mut occupants: Vec<Vec<usize>> = vec![Vec::new(); instance.gate_count()];
        for (f, &g) in gate_of.iter().enumerate() {
            occupants[g].push(f);
        }
        for list in &mut occupants {
            list.sort_by_key(|&f| (instance.window(f).t_in, instance.window(f).t_out, f));
        }
        Self { occupants }
    }

    pub fn insert(&mut self, instance: &ProblemInstance, flight: usize, gate: usize) {
        let list = &mut self.occupants[gate];
        let key = (instance.window(flight).t_in, instance.window(flight).t_out, flight);
        let pos = list
            .binary_search_by_key(&key, |&f| {
                (instance.window(f).t_in, instance.window(f).t_out, f)
            })
            .unwrap_err();
        list.insert(pos, flight);
    }

    pub fn remove(&mut self, gate: usize, flight: usize) {
        let list = &mut self.occupants[gate];
        let pos = list.iter().position(|&f| f == flight).expect("occupant");
        list.remove(pos);
    }

    /// Whether `flight` fits on `gate` against the current occupants,
    /// honoring compatibility and the buffer.
    pub fn fits(&self, instance: &ProblemInstance, flight: usize, gate: usize) -> bool {
        if !instance.is_compatible(flight, gate) {
            return false;
        }
        self.occupants[gate]
            .iter()
            .all(|&other| !instance.windows_conflict(flight, other))
    }

    /// Sum of pair costs between `flight` and the occupants of `gate`.
    pub fn coupling_cost(&self, instance: &ProblemInstance, flight: usize, gate: usize) -> Real {
        self.occupants[gate]
            .iter()
            .filter(|&&other| other != flight)
            .map(|&other| instance.pair_cost(instance.separation(flight, other)))
            .sum()
    }

    /// Occupants of `gate` whose windows intersect `[window.0, window.1]`.
    pub fn group_in_window(
        &self,
        instance: &ProblemInstance,
        gate: usize,
        window: (Minutes, Minutes),
    ) -> Vec<usize> {
        self.occupants[gate]
            .iter()
            .copied()
            .filter(|&f| {
                let w = instance.window(f);
                w.t_in <= window.1 && w.t_out >= window.0
            })
            .collect()
    }
}

/// Delta of moving `flight` to `to_gate`; `None` if the move is infeasible.
pub(crate) fn evaluate_insert(
    instance: &ProblemInstance,
    layout: &GateLayout,
    gate_of: &[usize],
    flight: usize,
    to_gate: usize,
) -> Option<Real> {
    let from_gate = gate_of[flight];
    if to_gate == from_gate || !layout.fits(instance, flight, to_gate) {
        return None;
    }
    let removed = layout.coupling_cost(instance, flight, from_gate);
    let added = layout.coupling_cost(instance, flight, to_gate);
    Some(added - removed)
}

pub(crate) fn apply_insert(
    instance: &ProblemInstance,
    layout: &mut GateLayout,
    gate_of: &mut [usize],
    flight: usize,
    to_gate: usize,
) {
    let from_gate = gate_of[flight];
    layout.remove(from_gate, flight);
    layout.insert(instance, flight, to_gate);
    gate_of[flight] = to_gate;
}

/// Groups swapped by an interval exchange, with the move's delta.
pub(crate) struct ExchangeEval {
    pub group_a: Vec<usize>,
    pub group_b: Vec<usize>,
    pub delta: Real,
}

/// Delta of swapping the window-intersecting groups of two gates;
/// `None` if either side would be incompatible or break the buffer.
pub(crate) fn evaluate_exchange(
    instance: &ProblemInstance,
    layout: &GateLayout,
    gate_a: usize,
    gate_b: usize,
    window: (Minutes, Minutes),
) -> Option<ExchangeEval> {
    if gate_a == gate_b {
        return None;
    }
    let group_a = layout.group_in_window(instance, gate_a, window);
    let group_b = layout.group_in_window(instance, gate_b, window);

    for &f in &group_a {
        if !instance.is_compatible(f, gate_b) {
            return None;
        }
    }
    for &f in &group_b {
        if !instance.is_compatible(f, gate_a) {
            return None;
        }
    }

    let rest_a: Vec<usize> = layout.occupants[gate_a]
        .iter()
        .copied()
        .filter(|f| !group_a.contains(f))
        .collect();
    let rest_b: Vec<usize> = layout.occupants[gate_b]
        .iter()
        .copied()
        .filter(|f| !group_b.contains(f))
        .collect();

    let conflict_free = |group: &[usize], rest: &[usize]| {
        group
            .iter()
            .all(|&f| rest.iter().all(|&r| !instance.windows_conflict(f, r)))
    };
    if !conflict_free(&group_b, &rest_a) || !conflict_free(&group_a, &rest_b) {
        return None;
    }

    // Within-group pairs travel with their group; only the coupling to the
    // flights left behind changes.
    let cross = |group: &[usize], rest: &[usize]| -> Real {
        group
            .iter()
            .map(|&f| {
                rest.iter()
                    .map(|&r| instance.pair_cost(instance.separation(f, r)))
                    .sum::<Real>()
            })
            .sum()
    };
    let removed = cross(&group_a, &rest_a) + cross(&group_b, &rest_b);
    let added = cross(&group_b, &rest_a) + cross(&group_a, &rest_b);

    Some(ExchangeEval {
        group_a,
        group_b,
        delta: added - removed,
    })
}

pub(crate) fn apply_exchange(
    instance: &ProblemInstance,
    layout: &mut GateLayout,
    gate_of: &mut [usize],
    gate_a: usize,
    gate_b: usize,
    eval: &ExchangeEval,
) {
    for &f in &eval.group_a {
        layout.remove(gate_a, f);
    }
    for &f in &eval.group_b {
        layout.remove(gate_b, f);
    }
    for &f in &eval.group_a {
        layout.insert(instance, f, gate_b);
        gate_of[f] = gate_b;
    }
    for &f in &eval.group_b {
        layout.insert(instance, f, gate_a);
        gate_of[f] = gate_a;
    }
}

/// Remaps one flight to another gate, returning the candidate assignment
/// and the incremental objective delta.
pub fn insert_move(
    instance: &ProblemInstance,
    assignment: &Assignment,
    flight_id: &str,
    target_gate_id: &str,
) -> Result<(Assignment, Real), AssignError> {
    let flight = instance
        .flight_index(flight_id)
        .ok_or_else(|| AssignError::MissingAssignment(flight_id.to_string()))?;
    let gate = instance
        .gate_index(target_gate_id)
        .ok_or_else(|| AssignError::UnknownGate(target_gate_id.to_string()))?;

    let layout = GateLayout::new(instance, &assignment.gate_of);
    let delta = evaluate_insert(instance, &layout, &assignment.gate_of, flight, gate)
        .ok_or_else(|| {
            AssignError::InfeasibleMove(format!("{flight_id} cannot move to {target_gate_id}"))
        })?;

    let mut gate_of = assignment.gate_of.clone();
    gate_of[flight] = gate;
    debug_assert!(check_feasible(instance, &gate_of).is_empty());
    Ok((
        Assignment::with_objective(gate_of, assignment.objective_value() + delta),
        delta,
    ))
}

/// Swaps the groups of two gates inside a time window, returning the
/// candidate assignment and the incremental objective delta.
pub fn interval_exchange_move(
    instance: &ProblemInstance,
    assignment: &Assignment,
    gate_a_id: &str,
    gate_b_id: &str,
    window: (Minutes, Minutes),
) -> Result<(Assignment, Real), AssignError> {
    let gate_a = instance
        .gate_index(gate_a_id)
        .ok_or_else(|| AssignError::UnknownGate(gate_a_id.to_string()))?;
    let gate_b = instance
        .gate_index(gate_b_id)
        .ok_or_else(|| AssignError::UnknownGate(gate_b_id.to_string()))?;
    if gate_a == gate_b {
        return Err(AssignError::InfeasibleMove("gates must differ".into()));
    }

    let mut layout = GateLayout::new(instance, &assignment.gate_of);
    let eval = evaluate_exchange(instance, &layout, gate_a, gate_b, window).ok_or_else(|| {
        AssignError::InfeasibleMove(format!(
            "groups of {gate_a_id} and {gate_b_id} cannot swap in {window:?}"
        ))
    })?;

    let mut gate_of = assignment.gate_of.clone();
    let delta = eval.delta;
    apply_exchange(instance, &mut layout, &mut gate_of, gate_a, gate_b, &eval);
    debug_assert!(check_feasible(instance, &gate_of).is_empty());
    Ok((
        Assignment::with_objective(gate_of, assignment.objective_value() + delta),
        delta,
    ))
}

#[cfg(test)]
mod tests {
    use super::super::tests::{open_gate, turn};
    use super::*;
    use crate::assignment::{objective_unchecked, InstanceParams};

    fn three_gate_instance() -> ProblemInstance {
        let flights = [
            turn("F1", 0, 100),
            turn("F2", 105, 200),
            turn("F3", 210, 300),
            turn("F4", 150, 260),
        ];
        let gates = [open_gate("G1"), open_gate("G2"), open_gate("G3")];
        ProblemInstance::new(&flights, &gates, InstanceParams::default()).unwrap()
    }

    #[test]
    fn lone_flight_to_empty_gate_is_free() {
        let flights = [turn("F1", 0, 100), turn("F2", 50, 150)];
        let gates = [open_gate("G1"), open_gate("G2"), open_gate("G3")];
        let inst = ProblemInstance::new(&flights, &gates, InstanceParams::default()).unwrap();
        let a = Assignment::new(&inst, vec![0, 1]).unwrap();
        let (moved, delta) = insert_move(&inst, &a, "F1", "G3").unwrap();
        assert_eq!(delta, 0.0);
        assert_eq!(moved.gate_of(0), 2);
    }

    #[test]
    fn insert_deltas_match_full_recomputation() {
        let inst = three_gate_instance();
        // F1,F2 share G1 (sep 5); F3, F4 elsewhere.
        let a = Assignment::new(&inst, vec![0, 0, 1, 2]).unwrap();
        let before = objective_unchecked(&inst, &a.gate_of);

        // Move F2 away from its neighbor to the empty-ish G3? G3 has F4
        // (150-260) which overlaps F2 (105-200): infeasible. Use F2 -> G2.
        let (after_assignment, delta) = insert_move(&inst, &a, "F2", "G2").unwrap();
        let after = objective_unchecked(&inst, &after_assignment.gate_of);
        assert!((after - before - delta).abs() < 1e-9);
        // Removing the sep-5 pair: delta is exactly -8 * 0.97^5.
        assert!((delta + 8.0 * 0.97f64.powi(5)).abs() < 1e-9);
    }

    #[test]
    fn insert_into_occupied_gate_charges_new_pair() {
        let inst = three_gate_instance();
        let a = Assignment::new(&inst, vec![0, 1, 2, 2]).unwrap();
        // F2 (105-200) joins F1 (0-100) on G1: sep 5.
        let (_, delta) = insert_move(&inst, &a, "F2", "G1").unwrap();
        assert!((delta - 8.0 * 0.97f64.powi(5)).abs() < 1e-9);
    }

    #[test]
    fn infeasible_insert_is_rejected() {
        let inst = three_gate_instance();
        let a = Assignment::new(&inst, vec![0, 1, 2, 1]).unwrap();
        // F4 (150-260) overlaps F2 (105-200) on G2 and F3 (210-300) on G3.
        assert!(insert_move(&inst, &a, "F4", "G3").is_err());
    }

    #[test]
    fn exchange_of_empty_groups_is_free() {
        let inst = three_gate_instance();
        let a = Assignment::new(&inst, vec![0, 0, 0, 0]).unwrap();
        // Window beyond every flight: both groups empty.
        let (_, delta) = interval_exchange_move(&inst, &a, "G2", "G3", (500, 600)).unwrap();
        assert_eq!(delta, 0.0);
    }

    #[test]
    fn swapping_singletons_between_empty_gates_is_free() {
        let inst = three_gate_instance();
        let a = Assignment::new(&inst, vec![0, 1, 2, 2]).unwrap();
        // F1 alone on G1, F2 alone on G2; objective only couples same-gate
        // pairs, so the swap changes nothing.
        let (swapped, delta) = interval_exchange_move(&inst, &a, "G1", "G2", (0, 200)).unwrap();
        assert_eq!(delta, 0.0);
        assert_eq!(swapped.gate_of(0), 1);
        assert_eq!(swapped.gate_of(1), 0);
    }

    #[test]
    fn exchange_deltas_match_full_recomputation() {
        let flights = [
            turn("F1", 0, 100),
            turn("F2", 105, 200), // tight pair with F1: sep 5
            turn("F3", 0, 95),
            turn("F4", 145, 250), // loose pair with F3: sep 50
        ];
        let gates = [open_gate("G1"), open_gate("G2")];
        let inst = ProblemInstance::new(&flights, &gates, InstanceParams::default()).unwrap();
        let a = Assignment::new(&inst, vec![0, 0, 1, 1]).unwrap();
        let before = objective_unchecked(&inst, &a.gate_of);

        // Swap the late flights (F2 <-> F4): separations become 45 and 10.
        let (after_assignment, delta) =
            interval_exchange_move(&inst, &a, "G1", "G2", (101, 260)).unwrap();
        let after = objective_unchecked(&inst, &after_assignment.gate_of);
        assert!((after - before - delta).abs() < 1e-9);
        let expected = 8.0 * (0.97f64.powi(45) + 0.97f64.powi(10))
            - 8.0 * (0.97f64.powi(5) + 0.97f64.powi(50));
        assert!((delta - expected).abs() < 1e-9);
    }

    #[test]
    fn exchange_that_loosens_a_tight_pair_pays_off() {
        let flights = [
            turn("F1", 0, 100),
            turn("F2", 105, 200), // sep 5 from F1
            turn("F3", 250, 340),
        ];
        let gates = [open_gate("G1"), open_gate("G2")];
        let inst = ProblemInstance::new(&flights, &gates, InstanceParams::default()).unwrap();
        let a = Assignment::new(&inst, vec![0, 0, 1]).unwrap();
        // Move F2's group (just F2) over to G2, bringing F3 back: the pair
        // F1-F3 has sep 150, much looser.
        let (_, delta) = interval_exchange_move(&inst, &a, "G1", "G2", (102, 400)).unwrap();
        let expected = 8.0 * (0.97f64.powi(150) - 0.97f64.powi(5));
        assert!((delta - expected).abs() < 1e-9);
        assert!(delta < 0.0);
    }
}
