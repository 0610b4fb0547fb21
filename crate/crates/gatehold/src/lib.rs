//! Airport departure operations under gate-holding control.
//!
//! The library has three layers:
//!
//! * a minute-stepped queuing simulator of the departure process
//!   (push-back queue, per-terminal taxi-out sampling, stochastic runway
//!   service) with an optional gate-holding policy keyed to a surface
//!   saturation threshold,
//! * a robust gate-assignment solver that maximizes gate separation by
//!   minimizing total expected overlap between consecutive gate users,
//!   solved by Tabu Search over insert and interval-exchange moves,
//! * calibration tooling that recovers the runway service parameters,
//!   taxi-out distributions, and the expected-overlap disturbance curve
//!   from observed (or synthetic) operational data.
//!
//! Numeric kernels are generic over the scalar type via [`scalar::Scalar`];
//! the rest of the crate works with the concrete aliases below.

pub mod assignment;
pub mod calibration;
pub mod experiments;
pub mod overlap;
pub mod rng;
pub mod scalar;
pub mod schedule;
pub mod sim;
pub mod takeoff;

/// Scalar type used by the concrete simulation and solver layers.
pub type Real = f64;

/// All times are integer minutes; the simulator advances in one-minute steps.
pub type Minutes = i64;

pub type TakeoffParams = calibration::TakeoffParams<Real>;
pub type TaxiFit = calibration::TaxiFit<Real>;
pub type ThroughputCurve = calibration::ThroughputCurve<Real>;
pub type RunwayProcess = takeoff::RunwayProcess<Real>;
pub type DisturbanceModel = overlap::DisturbanceModel<Real>;
pub type ExponentialFit = overlap::ExponentialFit<Real>;

pub use assignment::{Assignment, ProblemInstance};
pub use schedule::{EquipmentClass, Flight, Gate, Schedule};
pub use sim::{SimConfig, SimOutcome};
