//! Tabu Search over insert and interval-exchange moves.
//!
//! Every iteration scans the full insert neighborhood plus a seeded sample
//! of exchange windows, applies the best admissible candidate (worsening
//! moves included), and forbids returning a moved flight to its previous
//! gate for `tenure` iterations. A tabu move is still admissible when it
//! beats the best objective seen so far.

use std::collections::HashMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::moves::{
    apply_exchange, apply_insert, evaluate_exchange, evaluate_insert, GateLayout,
};
use super::{check_feasible, objective_unchecked, Assignment, AssignError, ProblemInstance};
use crate::rng::stream_rng;
use crate::{Minutes, Real};

const STREAM_TABU: u64 = 3;
const EXCHANGE_WINDOW_MIN: Minutes = 30;
const EXCHANGE_WINDOW_MAX: Minutes = 360;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TabuConfig {
    /// Iterations a reversed (flight, gate) pair stays forbidden.
    pub tenure: u32,
    /// Hard iteration budget.
    pub budget: u32,
    /// Stop after this many iterations without a new best.
    pub no_improve_limit: u32,
    /// Exchange windows sampled per iteration.
    pub exchange_samples: u32,
    /// Independent restarts; the best result wins, ties to the lowest seed.
    pub restarts: u32,
    pub seed: u64,
}

impl Default for TabuConfig {
    fn default() -> Self {
        Self {
            tenure: 20,
            budget: 2000,
            no_improve_limit: 500,
            exchange_samples: 50,
            restarts: 1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectivePoint {
    pub iteration: u32,
    pub objective: Real,
}

#[derive(Debug, Clone)]
pub struct TabuResult {
    pub best: Assignment,
    /// Best-so-far objective at each improvement, starting from the initial.
    pub trace: Vec<ObjectivePoint>,
    pub iterations: u32,
}

/// Greedy construction: flights in gate-in order, each to the compatible
/// gate maximizing separation from the gate's last flight; empty gates win,
/// ties go to the lowest gate id.
pub fn greedy_initial(instance: &ProblemInstance) -> Result<Assignment, AssignError> {
    let mut order: Vec<usize> = (0..instance.flight_count()).collect();
    order.sort_by_key(|&f| (instance.window(f).t_in, f));

    let mut last_out: Vec<Option<(Minutes, usize)>> = vec![None; instance.gate_count()];
    let mut gate_of = vec![usize::MAX; instance.flight_count()];

    for &f in &order {
        let window = instance.window(f);
        let mut best: Option<(Option<Minutes>, usize)> = None; // None sep = empty gate
        for g in 0..instance.gate_count() {
            if !instance.is_compatible(f, g) {
                continue;
            }
            let sep = match last_out[g] {
                None => None,
                Some((out, _)) => {
                    let sep = window.t_in - out;
                    if sep < instance.t_buff {
                        continue;
                    }
                    Some(sep)
                }
            };
            let better = match (&best, &sep) {
                (None, _) => true,
                (Some((None, _)), _) => false, // an empty gate is already chosen
                (Some((Some(_), _)), None) => true,
                (Some((Some(cur), _)), Some(new)) => new > cur,
            };
            if better {
                best = Some((sep, g));
            }
        }
        match best {
            Some((_, g)) => {
                gate_of[f] = g;
                last_out[g] = Some((window.t_out, f));
            }
            None => {
                return Err(AssignError::NoFeasibleInitial(format!(
                    "no gate can take flight {}",
                    instance.flight_id(f)
                )))
            }
        }
    }
    Assignment::new(instance, gate_of)
}

/// Runs Tabu Search from the given feasible assignment.
pub fn tabu_search(
    instance: &ProblemInstance,
    initial: &Assignment,
    config: &TabuConfig,
) -> Result<TabuResult, AssignError> {
    let violations = check_feasible(instance, &initial.gate_of);
    if !violations.is_empty() {
        return Err(AssignError::Infeasible(violations));
    }

    let restarts = config.restarts.max(1);
    let runs: Vec<(u32, TabuResult)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let rng = stream_rng(config.seed.wrapping_add(u64::from(r)), STREAM_TABU);
            (r, run_single(instance, initial, config, rng))
        })
        .collect();

    let best = runs
        .into_iter()
        .min_by(|(ra, a), (rb, b)| {
            a.best
                .objective_value()
                .partial_cmp(&b.best.objective_value())
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(ra.cmp(rb))
        })
        .map(|(_, result)| result)
        .expect("at least one restart");
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Candidate {
    Insert {
        flight: usize,
        to_gate: usize,
    },
    Exchange {
        gate_a: usize,
        gate_b: usize,
        window: (Minutes, Minutes),
        sample_idx: u32,
    },
}

fn run_single(
    instance: &ProblemInstance,
    initial: &Assignment,
    config: &TabuConfig,
    mut rng: ChaCha8Rng,
) -> TabuResult {
    let mut gate_of = initial.gate_of.clone();
    let mut layout = GateLayout::new(instance, &gate_of);
    let mut current = initial.objective_value();

    let mut best_gate_of = gate_of.clone();
    let mut best = current;
    let mut trace = vec![ObjectivePoint {
        iteration: 0,
        objective: best,
    }];

    // (flight, forbidden destination gate) -> first iteration it frees up.
    let mut tabu_until: HashMap<(usize, usize), u32> = HashMap::new();
    let mut no_improve = 0u32;
    let mut iterations = 0u32;
    let horizon = instance.horizon();

    for iter in 0..config.budget {
        if no_improve >= config.no_improve_limit {
            break;
        }
        iterations = iter + 1;

        // Exchange windows are drawn every iteration regardless of what is
        // chosen, keeping the rng stream aligned across iterations.
        let mut exchange_candidates = Vec::with_capacity(config.exchange_samples as usize);
        for s in 0..config.exchange_samples {
            if instance.gate_count() < 2 {
                break;
            }
            let gate_a = rng.gen_range(0..instance.gate_count());
            let mut gate_b = rng.gen_range(0..instance.gate_count() - 1);
            if gate_b >= gate_a {
                gate_b += 1;
            }
            let len = rng.gen_range(EXCHANGE_WINDOW_MIN..=EXCHANGE_WINDOW_MAX);
            let lo = if horizon.1 - len > horizon.0 {
                rng.gen_range(horizon.0..horizon.1 - len)
            } else {
                horizon.0
            };
            exchange_candidates.push((gate_a, gate_b, (lo, lo + len), s));
        }

        let mut chosen: Option<(Real, Candidate)> = None;
        let mut consider = |delta: Real, cand: Candidate, chosen: &mut Option<(Real, Candidate)>| {
            match chosen {
                None => *chosen = Some((delta, cand)),
                Some((best_delta, _)) => {
                    // Strict improvement only: scan order is the tie-break
                    // (inserts by (flight, gate), then exchanges by sample).
                    if delta < *best_delta - 1e-15 {
                        *chosen = Some((delta, cand));
                    }
                }
            }
        };

        for flight in 0..instance.flight_count() {
            for to_gate in 0..instance.gate_count() {
                let Some(delta) = evaluate_insert(instance, &layout, &gate_of, flight, to_gate)
                else {
                    continue;
                };
                let tabu = tabu_until
                    .get(&(flight, to_gate))
                    .is_some_and(|&until| iter < until);
                let aspires = current + delta < best - 1e-12;
                if tabu && !aspires {
                    continue;
                }
                consider(delta, Candidate::Insert { flight, to_gate }, &mut chosen);
            }
        }

        for &(gate_a, gate_b, window, sample_idx) in &exchange_candidates {
            let Some(eval) = evaluate_exchange(instance, &layout, gate_a, gate_b, window) else {
                continue;
            };
            if eval.group_a.is_empty() && eval.group_b.is_empty() {
                continue;
            }
            let tabu = eval
                .group_a
                .iter()
                .any(|&f| tabu_until.get(&(f, gate_b)).is_some_and(|&u| iter < u))
                || eval
                    .group_b
                    .iter()
                    .any(|&f| tabu_until.get(&(f, gate_a)).is_some_and(|&u| iter < u));
            let aspires = current + eval.delta < best - 1e-12;
            if tabu && !aspires {
                continue;
            }
            consider(
                eval.delta,
                Candidate::Exchange {
                    gate_a,
                    gate_b,
                    window,
                    sample_idx,
                },
                &mut chosen,
            );
        }

        let Some((delta, candidate)) = chosen else {
            break; // fully tabu neighborhood, nothing admissible
        };

        match candidate {
            Candidate::Insert { flight, to_gate } => {
                let from_gate = gate_of[flight];
                apply_insert(instance, &mut layout, &mut gate_of, flight, to_gate);
                tabu_until.insert((flight, from_gate), iter + 1 + config.tenure);
            }
            Candidate::Exchange { gate_a, gate_b, window, .. } => {
                let eval = evaluate_exchange(instance, &layout, gate_a, gate_b, window)
                    .expect("candidate re-evaluates");
                for &f in &eval.group_a {
                    tabu_until.insert((f, gate_a), iter + 1 + config.tenure);
                }
                for &f in &eval.group_b {
                    tabu_until.insert((f, gate_b), iter + 1 + config.tenure);
                }
                apply_exchange(instance, &mut layout, &mut gate_of, gate_a, gate_b, &eval);
            }
        }
        current += delta;

        if current < best - 1e-12 {
            // Recompute exactly so the recorded best carries no float drift.
            current = objective_unchecked(instance, &gate_of);
            if current < best {
                best = current;
                best_gate_of = gate_of.clone();
                trace.push(ObjectivePoint {
                    iteration: iter + 1,
                    objective: best,
                });
                no_improve = 0;
                continue;
            }
        }
        no_improve += 1;
    }

    debug_assert!(check_feasible(instance, &best_gate_of).is_empty());
    TabuResult {
        best: Assignment::with_objective(best_gate_of, best),
        trace,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::{open_gate, turn};
    use super::*;
    use crate::assignment::{brute_force, InstanceParams};

    fn config(budget: u32, seed: u64) -> TabuConfig {
        TabuConfig {
            tenure: 8,
            budget,
            no_improve_limit: 200,
            exchange_samples: 20,
            restarts: 1,
            seed,
        }
    }

    #[test]
    fn all_flights_fit_alone_reaches_zero() {
        let flights = [
            turn("F1", 0, 100),
            turn("F2", 50, 150),
            turn("F3", 100, 220),
        ];
        let gates = [open_gate("G1"), open_gate("G2"), open_gate("G3")];
        let inst = ProblemInstance::new(&flights, &gates, InstanceParams::default()).unwrap();
        let initial = greedy_initial(&inst).unwrap();
        let result = tabu_search(&inst, &initial, &config(50, 1)).unwrap();
        assert_eq!(result.best.objective_value(), 0.0);
    }

    #[test]
    fn budget_zero_returns_initial() {
        let flights = [turn("F1", 0, 100), turn("F2", 120, 200)];
        let gates = [open_gate("G1")];
        let inst = ProblemInstance::new(&flights, &gates, InstanceParams::default()).unwrap();
        let initial = greedy_initial(&inst).unwrap();
        let result = tabu_search(&inst, &initial, &config(0, 1)).unwrap();
        assert_eq!(result.best.gate_of, initial.gate_of);
        assert_eq!(result.best.objective_value(), initial.objective_value());
        assert_eq!(result.iterations, 0);
    }

    #[test]
    fn matches_brute_force_on_small_instance() {
        let flights = [
            turn("F1", 0, 100),
            turn("F2", 105, 200),
            turn("F3", 205, 300),
            turn("F4", 20, 130),
            turn("F5", 140, 260),
            turn("F6", 280, 380),
        ];
        let gates = [open_gate("G1"), open_gate("G2"), open_gate("G3")];
        let inst = ProblemInstance::new(&flights, &gates, InstanceParams::default()).unwrap();
        let optimal = brute_force(&inst).unwrap();
        let initial = greedy_initial(&inst).unwrap();
        let result = tabu_search(&inst, &initial, &config(300, 7)).unwrap();
        assert!(
            (result.best.objective_value() - optimal.objective_value()).abs() < 1e-9,
            "tabu {} vs brute {}",
            result.best.objective_value(),
            optimal.objective_value()
        );
    }

    #[test]
    fn trace_is_non_increasing_and_deterministic() {
        let flights: Vec<_> = (0..12)
            .map(|i| {
                let start = i64::from(i) * 37 % 400;
                turn(&format!("F{i:02}"), start, start + 90)
            })
            .collect();
        let gates = [
            open_gate("G1"),
            open_gate("G2"),
            open_gate("G3"),
            open_gate("G4"),
            open_gate("G5"),
        ];
        let inst = ProblemInstance::new(&flights, &gates, InstanceParams::default()).unwrap();
        let initial = greedy_initial(&inst).unwrap();
        let a = tabu_search(&inst, &initial, &config(150, 3)).unwrap();
        let b = tabu_search(&inst, &initial, &config(150, 3)).unwrap();
        assert_eq!(a.best.gate_of, b.best.gate_of);
        for pair in a.trace.windows(2) {
            assert!(pair[1].objective <= pair[0].objective);
        }
    }

    #[test]
    fn greedy_fails_when_everything_collides() {
        let flights = [turn("F1", 0, 100), turn("F2", 50, 150)];
        let gates = [open_gate("G1")];
        let inst = ProblemInstance::new(&flights, &gates, InstanceParams::default()).unwrap();
        assert!(matches!(
            greedy_initial(&inst),
            Err(AssignError::NoFeasibleInitial(_))
        ));
    }
}
