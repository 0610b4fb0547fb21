//! Synthetic schedule generation.
//!
//! Each gate's timeline is a walk of turn occupancies separated by gaps
//! drawn around a target mean separation; a periodic demand profile
//! (banking) compresses gaps during waves. Actual times are scheduled times
//! plus shifted-lognormal delays, which go negative for early operations.
//! Generated turns are emitted as separate arrival and departure legs with
//! the generating gate recorded as the current assignment.

use rand::Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use super::{EquipmentClass, Flight, Gate, Schedule, ScheduleError};
use crate::rng::stream_rng;
use crate::Minutes;

const STREAM_GENERATOR: u64 = 1;

/// Shifted lognormal delay: `round(LogNormal(mu_log, sigma_log)) - shift`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DelayConfig {
    pub mu_log: f64,
    pub sigma_log: f64,
    pub shift_min: f64,
}

impl DelayConfig {
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Minutes {
        let ln = LogNormal::new(self.mu_log, self.sigma_log).expect("valid lognormal");
        (ln.sample(rng) - self.shift_min).round() as Minutes
    }

    pub fn mean(&self) -> f64 {
        (self.mu_log + 0.5 * self.sigma_log * self.sigma_log).exp() - self.shift_min
    }
}

/// Gates and airlines of one terminal.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TerminalSpec {
    pub label: String,
    pub gate_count: u32,
    pub airlines: Vec<String>,
    /// Fraction of this terminal's gates restricted to small equipment.
    pub small_only_fraction: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub terminals: Vec<TerminalSpec>,
    /// Number of turns to place (each becomes one arrival and one departure leg).
    pub turns: u32,
    pub horizon: (Minutes, Minutes),
    /// Window in which gate activity is generated.
    pub active_window: (Minutes, Minutes),
    pub mean_occupancy_min: f64,
    pub occupancy_sigma_log: f64,
    pub mean_separation_min: f64,
    pub separation_sigma_log: f64,
    /// Demand waves across the active window.
    pub banks: u32,
    /// Modulation depth of the banking profile, in [0, 1).
    pub bank_amplitude: f64,
    /// Fraction of flights that are small equipment (on dual-class gates).
    pub small_fraction: f64,
    pub dep_delay: DelayConfig,
    pub arr_delay: DelayConfig,
    /// Lower bound on the actual turn time after delays are applied.
    pub min_turn_min: Minutes,
}

impl GeneratorConfig {
    fn validate(&self) -> Result<(), ScheduleError> {
        if self.terminals.is_empty() || self.terminals.iter().all(|t| t.gate_count == 0) {
            return Err(ScheduleError::InfeasibleConfig("no gates".into()));
        }
        if self.active_window.0 < self.horizon.0 || self.active_window.1 > self.horizon.1 {
            return Err(ScheduleError::InfeasibleConfig(
                "active window outside horizon".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.bank_amplitude) {
            return Err(ScheduleError::InfeasibleConfig(
                "bank amplitude must be in [0, 1)".into(),
            ));
        }
        let gates: u32 = self.terminals.iter().map(|t| t.gate_count).sum();
        let active_len = (self.active_window.1 - self.active_window.0) as f64;
        if f64::from(self.turns) * self.mean_occupancy_min > f64::from(gates) * active_len {
            return Err(ScheduleError::InfeasibleConfig(format!(
                "{} turns exceed {} gates x {} min of gate time",
                self.turns, gates, active_len
            )));
        }
        Ok(())
    }
}

/// Generates a schedule of arrival/departure legs, deterministic in `seed`.
pub fn gen_synthetic(config: &GeneratorConfig, seed: u64) -> Result<Schedule, ScheduleError> {
    config.validate()?;
    let mut rng = stream_rng(seed, STREAM_GENERATOR);

    let gates = build_gates(config);
    let (start, end) = config.active_window;
    let span = (end - start) as f64;

    // Demand profile rho(t): gaps are divided by it, so waves compress
    // separations. base keeps the overall mean on target: E[1/rho] over a
    // full period is 1/sqrt(1-a^2).
    let amp = config.bank_amplitude;
    let rho = |t: f64| 1.0 + amp * (std::f64::consts::TAU * f64::from(config.banks) * t / span).cos();
    let base_sep = config.mean_separation_min * (1.0 - amp * amp).sqrt();

    let occupancy = lognormal_with_mean(config.mean_occupancy_min, config.occupancy_sigma_log);
    let gap_shape = lognormal_with_mean(1.0, config.separation_sigma_log);

    // Stagger gate start cursors across one mean cycle so gates desynchronize.
    let mean_cycle = config.mean_occupancy_min + config.mean_separation_min;
    let mut cursors: Vec<Minutes> = (0..gates.len())
        .map(|_| start + rng.gen_range(0.0..mean_cycle).round() as Minutes)
        .collect();

    struct Turn {
        gate: usize,
        t_in: Minutes,
        t_out: Minutes,
    }
    let mut turns: Vec<Turn> = Vec::with_capacity(config.turns as usize);

    for placed in 0..config.turns {
        // Earliest-available gate keeps load even across gates.
        let gate = (0..cursors.len())
            .min_by_key(|&g| (cursors[g], g))
            .expect("at least one gate");
        let t_in = cursors[gate];
        let occ = occupancy.sample(&mut rng).round().max(15.0) as Minutes;
        let t_out = t_in + occ;
        if t_out > end {
            return Err(ScheduleError::InfeasibleConfig(format!(
                "only {placed} of {} turns fit in the active window",
                config.turns
            )));
        }
        let local = ((t_out - start) as f64).rem_euclid(span);
        let gap = (base_sep / rho(local) * gap_shape.sample(&mut rng))
            .round()
            .max(1.0) as Minutes;
        cursors[gate] = t_out + gap;
        turns.push(Turn { gate, t_in, t_out });
    }

    turns.sort_by_key(|t| (t.t_in, t.gate));

    let mut flights = Vec::with_capacity(turns.len() * 2);
    for (k, turn) in turns.iter().enumerate() {
        let gate = &gates[turn.gate];
        let airline = gate
            .compatible_airlines
            .iter()
            .nth(rng.gen_range(0..gate.compatible_airlines.len()))
            .expect("non-empty airline set")
            .clone();
        let equipment = if gate.compatible_equipment.contains(&EquipmentClass::Large)
            && rng.gen::<f64>() >= config.small_fraction
        {
            EquipmentClass::Large
        } else {
            EquipmentClass::Small
        };

        let sched_arr = turn.t_in;
        let sched_dep = turn.t_out;
        let act_arr = clamp(sched_arr + config.arr_delay.sample(&mut rng), config.horizon);
        let act_dep = clamp(sched_dep + config.dep_delay.sample(&mut rng), config.horizon)
            .max(act_arr + config.min_turn_min)
            .min(config.horizon.1);

        let mk = |suffix: &str| Flight {
            id: format!("F{k:05}{suffix}"),
            airline: airline.clone(),
            terminal: gate.terminal.clone(),
            equipment_class: equipment,
            sched_arr: None,
            sched_dep: None,
            act_arr: None,
            act_dep: None,
            current_gate: Some(gate.id.clone()),
        };
        let mut arr_leg = mk("A");
        arr_leg.sched_arr = Some(sched_arr);
        arr_leg.act_arr = Some(act_arr);
        let mut dep_leg = mk("D");
        dep_leg.sched_dep = Some(sched_dep);
        dep_leg.act_dep = Some(act_dep);
        flights.push(arr_leg);
        flights.push(dep_leg);
    }

    let schedule = Schedule {
        flights,
        gates,
        horizon: config.horizon,
    };
    schedule.validate()?;
    Ok(schedule)
}

fn build_gates(config: &GeneratorConfig) -> Vec<Gate> {
    let mut gates = Vec::new();
    for term in &config.terminals {
        let small_only = (f64::from(term.gate_count) * term.small_only_fraction).round() as u32;
        for i in 0..term.gate_count {
            let equipment = if i < small_only {
                [EquipmentClass::Small].into_iter().collect()
            } else {
                [EquipmentClass::Small, EquipmentClass::Large]
                    .into_iter()
                    .collect()
            };
            gates.push(Gate {
                id: format!("{}{:02}", term.label, i + 1),
                terminal: term.label.clone(),
                compatible_airlines: term.airlines.iter().cloned().collect(),
                compatible_equipment: equipment,
            });
        }
    }
    gates
}

fn lognormal_with_mean(mean: f64, sigma_log: f64) -> LogNormal<f64> {
    let mu_log = mean.ln() - 0.5 * sigma_log * sigma_log;
    LogNormal::new(mu_log, sigma_log).expect("valid lognormal")
}

fn clamp(t: Minutes, horizon: (Minutes, Minutes)) -> Minutes {
    t.clamp(horizon.0, horizon.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn small_config(turns: u32) -> GeneratorConfig {
        GeneratorConfig {
            terminals: vec![TerminalSpec {
                label: "B".into(),
                gate_count: 4,
                airlines: vec!["DL".into(), "WN".into()],
                small_only_fraction: 0.25,
            }],
            turns,
            horizon: (0, 2000),
            active_window: (360, 1440),
            mean_occupancy_min: 45.0,
            occupancy_sigma_log: 0.25,
            mean_separation_min: 94.0,
            separation_sigma_log: 0.9,
            banks: 4,
            bank_amplitude: 0.4,
            small_fraction: 0.6,
            dep_delay: DelayConfig {
                mu_log: 3.2,
                sigma_log: 0.8,
                shift_min: 15.0,
            },
            arr_delay: DelayConfig {
                mu_log: 3.0,
                sigma_log: 0.8,
                shift_min: 18.0,
            },
            min_turn_min: 10,
        }
    }

    #[test]
    fn one_turn_inside_horizon() {
        let schedule = gen_synthetic(&small_config(1), 7).unwrap();
        assert_eq!(schedule.flights.len(), 2);
        schedule.validate().unwrap();
        let arr = &schedule.flights[0];
        assert!(arr.is_arrival_leg());
        assert!(arr.sched_arr.unwrap() >= 360);
    }

    #[test]
    fn same_seed_reproduces_schedule() {
        let a = gen_synthetic(&small_config(20), 42).unwrap();
        let b = gen_synthetic(&small_config(20), 42).unwrap();
        assert_eq!(a, b);
        let c = gen_synthetic(&small_config(20), 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn mean_separation_tracks_target() {
        let mut config = small_config(120);
        config.terminals[0].gate_count = 16;
        let schedule = gen_synthetic(&config, 11).unwrap();

        // Consecutive same-gate separation of the embedded assignment.
        let mut by_gate: BTreeMap<&str, Vec<(i64, i64)>> = BTreeMap::new();
        let mut arr_by_turn: BTreeMap<&str, i64> = BTreeMap::new();
        for f in &schedule.flights {
            if let Some(t) = f.sched_arr {
                arr_by_turn.insert(f.id.trim_end_matches('A'), t);
            }
        }
        for f in &schedule.flights {
            if let Some(dep) = f.sched_dep {
                let key = f.id.trim_end_matches('D');
                let arr = arr_by_turn[key];
                by_gate
                    .entry(f.current_gate.as_deref().unwrap())
                    .or_default()
                    .push((arr, dep));
            }
        }
        let mut seps = Vec::new();
        for windows in by_gate.values_mut() {
            windows.sort_unstable();
            for pair in windows.windows(2) {
                seps.push((pair[1].0 - pair[0].1) as f64);
            }
        }
        let mean = seps.iter().sum::<f64>() / seps.len() as f64;
        assert!(
            (mean - 94.0).abs() <= 10.0,
            "mean separation {mean:.1} outside 94 +/- 10"
        );
    }

    #[test]
    fn infeasible_config_is_rejected() {
        let mut config = small_config(2000);
        config.active_window = (360, 480);
        assert!(matches!(
            gen_synthetic(&config, 1),
            Err(ScheduleError::InfeasibleConfig(_))
        ));
    }

    #[test]
    fn actual_turn_ordering_holds() {
        let schedule = gen_synthetic(&small_config(50), 3).unwrap();
        for f in &schedule.flights {
            f.validate().unwrap();
        }
    }
}
