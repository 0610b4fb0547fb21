//! Calibration of the departure model from observed events: surface-count /
//! take-off-rate series, saturation detection, runway service parameters,
//! and per-terminal taxi-out distributions.

mod series;
mod takeoff_fit;
mod taxi_fit;

pub use series::{
    build_series, correlation_scan, detect_saturation, throughput_curve, CorrelationScan,
    SurfaceSeries, DEFAULT_SATURATION_WINDOW, DEFAULT_SLOPE_THRESHOLD,
};
pub use takeoff_fit::{
    count_histogram_from_rates, fit_takeoff_params, simulated_count_histogram,
    solve_probabilities, RateTarget, TakeoffFit,
};
pub use taxi_fit::fit_taxi_lognormal;

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;
use crate::Minutes;

/// Take-off rates are averaged over `[t, t+9]`: a 10-minute window.
pub const RATE_WINDOW_MIN: usize = 10;

/// Three-point stochastic runway service model.
///
/// Each minute the runway clears at rate `c1`, `c2`, or `c3` aircraft/min
/// with probabilities `p1`, `p2`, `1 - p1 - p2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TakeoffParams<S> {
    pub c1: S,
    pub c2: S,
    pub c3: S,
    pub p1: S,
    pub p2: S,
}

impl<S: Scalar> TakeoffParams<S> {
    pub fn new(c1: S, c2: S, c3: S, p1: S, p2: S) -> Result<Self, CalibrationError> {
        let params = Self { c1, c2, c3, p1, p2 };
        params.validate()?;
        Ok(params)
    }

    /// Degenerate single-rate model; probabilities are immaterial.
    pub fn constant_rate(c: S) -> Self {
        let third = S::from_f64_lossy(1.0 / 3.0);
        Self {
            c1: c,
            c2: c,
            c3: c,
            p1: third,
            p2: third,
        }
    }

    pub fn p3(&self) -> S {
        S::one() - self.p1 - self.p2
    }

    pub fn validate(&self) -> Result<(), CalibrationError> {
        let zero = S::zero();
        let eps = S::from_f64_lossy(1e-12);
        if self.c1 < zero || self.c2 < zero || self.c3 < zero {
            return Err(CalibrationError::InvalidParams("negative rate".into()));
        }
        if self.p1 < zero - eps || self.p2 < zero - eps || self.p3() < zero - eps {
            return Err(CalibrationError::InvalidParams(
                "probabilities outside [0, 1]".into(),
            ));
        }
        Ok(())
    }

    /// Mean service rate in aircraft/min.
    pub fn mean_rate(&self) -> S {
        self.c1 * self.p1 + self.c2 * self.p2 + self.c3 * self.p3()
    }

    /// Standard deviation of the rate averaged over a 10-minute window.
    pub fn window_rate_std(&self) -> S {
        let mu = self.mean_rate();
        let second = self.c1 * self.c1 * self.p1
            + self.c2 * self.c2 * self.p2
            + self.c3 * self.c3 * self.p3();
        ((second - mu * mu) / S::from_usize(RATE_WINDOW_MIN).unwrap()).sqrt()
    }
}

/// Mean/σ of the take-off rate per surface count N, with sample counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThroughputCurve<S> {
    pub entries: Vec<ThroughputEntry<S>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThroughputEntry<S> {
    pub n: u32,
    pub mean_rate: S,
    pub std_rate: S,
    pub sample_count: usize,
}

/// Lognormal fit of nominal (unimpeded) taxi-out minutes for one terminal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaxiFit<S> {
    pub terminal: String,
    pub mu_log: S,
    pub sigma_log: S,
    pub sample_count: usize,
}

/// One departure in an events stream: push-back and take-off minutes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepartureEvent {
    pub flight_id: String,
    pub pushback_min: Minutes,
    pub takeoff_min: Minutes,
    pub terminal: String,
}

/// Loads an events CSV; extra columns are ignored so simulation traces can
/// be fed back in directly.
pub fn load_events(path: &Path) -> Result<Vec<DepartureEvent>, CalibrationError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CalibrationError::Csv {
            row: 0,
            msg: e.to_string(),
        })?;
    let headers = reader
        .headers()
        .map_err(|e| CalibrationError::Csv {
            row: 1,
            msg: e.to_string(),
        })?
        .clone();
    let col = |name: &str| -> Result<usize, CalibrationError> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CalibrationError::Csv {
                row: 1,
                msg: format!("missing column {name}"),
            })
    };
    let (ci, cp, ct, cterm) = (
        col("flight_id")?,
        col("pushback_min")?,
        col("takeoff_min")?,
        col("terminal")?,
    );

    let mut events = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 2;
        let record = record.map_err(|e| CalibrationError::Csv {
            row,
            msg: e.to_string(),
        })?;
        let parse = |i: usize| -> Result<Minutes, CalibrationError> {
            record
                .get(i)
                .unwrap_or("")
                .parse()
                .map_err(|_| CalibrationError::Csv {
                    row,
                    msg: format!("bad integer {:?}", record.get(i).unwrap_or("")),
                })
        };
        events.push(DepartureEvent {
            flight_id: record.get(ci).unwrap_or("").to_string(),
            pushback_min: parse(cp)?,
            takeoff_min: parse(ct)?,
            terminal: record.get(cterm).unwrap_or("").to_string(),
        });
    }
    Ok(events)
}

#[derive(Debug, Error)]
pub enum CalibrationError {
    #[error("events not sorted by push-back time")]
    UnsortedEvents,
    #[error("take-off before push-back for flight {0}")]
    TakeoffBeforePushback(String),
    #[error("series is constant; correlation undefined for all offsets")]
    ConstantSeries,
    #[error("throughput curve has a gap at N={0}")]
    NonContiguousCurve(u32),
    #[error("no saturation in range")]
    NoSaturation,
    #[error("no feasible probabilities anywhere on the rate grid")]
    NoFeasibleParams,
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { got: usize, need: usize },
    #[error("non-positive taxi time {0}")]
    NonPositiveTaxiTime(f64),
    #[error("invalid take-off parameters: {0}")]
    InvalidParams(String),
    #[error("csv error at row {row}: {msg}")]
    Csv { row: usize, msg: String },
}
