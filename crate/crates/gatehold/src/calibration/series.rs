//! Surface-count and take-off-rate time series.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use super::{
    CalibrationError, DepartureEvent, ThroughputCurve, ThroughputEntry, RATE_WINDOW_MIN,
};
use crate::scalar::{mean, pearson, std_dev, Scalar};
use crate::Minutes;

/// Saturation is declared where the throughput gain per unit N over a
/// window this wide falls below [`DEFAULT_SLOPE_THRESHOLD`].
pub const DEFAULT_SATURATION_WINDOW: u32 = 3;
pub const DEFAULT_SLOPE_THRESHOLD: f64 = 0.01;

/// Minute-gridded series: `taxiing[i]` counts aircraft that have pushed back
/// and not yet taken off at minute `start_min + i`; `takeoff_rate[i]` is the
/// take-off count over the next 10 minutes divided by 10.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSeries<S> {
    pub start_min: Minutes,
    pub taxiing: Vec<u32>,
    pub takeoff_rate: Vec<S>,
}

impl<S: Scalar> SurfaceSeries<S> {
    pub fn len(&self) -> usize {
        self.taxiing.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taxiing.is_empty()
    }
}

/// Builds N(t) and T(t) from an events stream sorted by push-back time.
pub fn build_series<S: Scalar>(
    events: &[DepartureEvent],
) -> Result<SurfaceSeries<S>, CalibrationError> {
    if events.is_empty() {
        return Ok(SurfaceSeries {
            start_min: 0,
            taxiing: Vec::new(),
            takeoff_rate: Vec::new(),
        });
    }
    for pair in events.windows(2) {
        if pair[1].pushback_min < pair[0].pushback_min {
            return Err(CalibrationError::UnsortedEvents);
        }
    }
    for e in events {
        if e.takeoff_min < e.pushback_min {
            return Err(CalibrationError::TakeoffBeforePushback(e.flight_id.clone()));
        }
    }

    let start = events[0].pushback_min;
    let end = events.iter().map(|e| e.takeoff_min).max().unwrap();
    let len = (end - start + 1) as usize;

    // N(t): +1 over [pushback, takeoff), via a difference array.
    let mut diff = vec![0i64; len + 1];
    let mut takeoffs = vec![0u32; len];
    for e in events {
        let pb = (e.pushback_min - start) as usize;
        let to = (e.takeoff_min - start) as usize;
        diff[pb] += 1;
        diff[to] -= 1;
        takeoffs[to] += 1;
    }
    let mut taxiing = Vec::with_capacity(len);
    let mut running = 0i64;
    for d in &diff[..len] {
        running += d;
        taxiing.push(running as u32);
    }

    let window = S::from_usize(RATE_WINDOW_MIN).unwrap();
    let takeoff_rate = (0..len)
        .map(|t| {
            let hi = (t + RATE_WINDOW_MIN).min(len);
            let count: u32 = takeoffs[t..hi].iter().sum();
            S::from_u32(count).unwrap() / window
        })
        .collect();

    Ok(SurfaceSeries {
        start_min: start,
        taxiing,
        takeoff_rate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationScan<S> {
    /// Correlation of N(t) with T(t + offset); `None` where undefined.
    pub by_offset: Vec<(i32, Option<S>)>,
    pub best_offset: i32,
}

/// Correlates the surface count against time-shifted take-off rates and
/// reports the offset with the highest correlation.
pub fn correlation_scan<S: Scalar>(
    series: &SurfaceSeries<S>,
    offsets: RangeInclusive<i32>,
) -> Result<CorrelationScan<S>, CalibrationError> {
    let n = series.len();
    let mut by_offset = Vec::new();
    let mut best: Option<(S, i32)> = None;

    for dt in offsets {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for t in 0..n {
            let shifted = t as i64 + i64::from(dt);
            if shifted < 0 || shifted >= n as i64 {
                continue;
            }
            xs.push(S::from_u32(series.taxiing[t]).unwrap());
            ys.push(series.takeoff_rate[shifted as usize]);
        }
        let corr = pearson(&xs, &ys);
        if let Some(c) = corr {
            let better = match best {
                None => true,
                Some((bc, _)) => c > bc,
            };
            if better {
                best = Some((c, dt));
            }
        }
        by_offset.push((dt, corr));
    }

    match best {
        Some((_, dt)) => Ok(CorrelationScan {
            by_offset,
            best_offset: dt,
        }),
        None => Err(CalibrationError::ConstantSeries),
    }
}

/// Groups take-off rates by the simultaneous surface count.
pub fn throughput_curve<S: Scalar>(series: &SurfaceSeries<S>) -> ThroughputCurve<S> {
    let max_n = series.taxiing.iter().copied().max().unwrap_or(0);
    let mut buckets: Vec<Vec<S>> = vec![Vec::new(); (max_n + 1) as usize];
    for (n, rate) in series.taxiing.iter().zip(&series.takeoff_rate) {
        buckets[*n as usize].push(*rate);
    }
    let entries = buckets
        .into_iter()
        .enumerate()
        .filter(|(_, rates)| !rates.is_empty())
        .map(|(n, rates)| ThroughputEntry {
            n: n as u32,
            mean_rate: mean(&rates),
            std_rate: std_dev(&rates),
            sample_count: rates.len(),
        })
        .collect();
    ThroughputCurve { entries }
}

/// Finds the saturation point N*: the smallest N beyond which the mean rate
/// gains less than `slope_threshold` per unit N over a `window`-wide span.
pub fn detect_saturation<S: Scalar>(
    curve: &ThroughputCurve<S>,
    slope_threshold: S,
    window: u32,
) -> Result<u32, CalibrationError> {
    assert!(window >= 1, "window must be at least 1");
    let entries = &curve.entries;
    if entries.is_empty() {
        return Err(CalibrationError::NoSaturation);
    }
    for pair in entries.windows(2) {
        if pair[1].n != pair[0].n + 1 {
            return Err(CalibrationError::NonContiguousCurve(pair[0].n + 1));
        }
    }

    let max_idx = entries.len() - 1;
    for (i, entry) in entries.iter().enumerate() {
        let span = window.min((max_idx - i) as u32);
        if span == 0 {
            break; //末 entry has no forward span
        }
        let ahead = entries[i + span as usize].mean_rate;
        let slope = (ahead - entry.mean_rate) / S::from_u32(span).unwrap();
        if slope < slope_threshold {
            return Ok(entry.n);
        }
    }
    Err(CalibrationError::NoSaturation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn event(id: &str, pb: i64, to: i64) -> DepartureEvent {
        DepartureEvent {
            flight_id: id.into(),
            pushback_min: pb,
            takeoff_min: to,
            terminal: "B".into(),
        }
    }

    #[test]
    fn empty_events_empty_series() {
        let s: SurfaceSeries<f64> = build_series(&[]).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn single_flight_hand_trace() {
        let s: SurfaceSeries<f64> = build_series(&[event("F1", 0, 5)]).unwrap();
        assert_eq!(s.taxiing, vec![1, 1, 1, 1, 1, 0]);
        assert_relative_eq!(s.takeoff_rate[0], 0.1);
    }

    #[test]
    fn ten_takeoffs_in_window_give_unit_rate() {
        let events: Vec<_> = (0..10).map(|i| event(&format!("F{i}"), 0, i)).collect();
        let s: SurfaceSeries<f64> = build_series(&events).unwrap();
        assert_relative_eq!(s.takeoff_rate[0], 1.0);
    }

    #[test]
    fn unsorted_events_rejected() {
        let r: Result<SurfaceSeries<f64>, _> =
            build_series(&[event("F1", 10, 20), event("F2", 5, 25)]);
        assert!(matches!(r, Err(CalibrationError::UnsortedEvents)));
    }

    #[test]
    fn correlation_identity_and_shift() {
        // Construct a series where T is exactly N shifted by 3 minutes.
        let n: Vec<u32> = (0..200).map(|t| ((t * 7 + 3) % 13) as u32).collect();
        let rate: Vec<f64> = (0..200)
            .map(|t: i64| {
                let src = t - 3;
                if (0..200).contains(&src) {
                    f64::from(n[src as usize])
                } else {
                    0.0
                }
            })
            .collect();
        let series = SurfaceSeries {
            start_min: 0,
            taxiing: n.clone(),
            takeoff_rate: rate,
        };
        let scan = correlation_scan(&series, -6..=6).unwrap();
        assert_eq!(scan.best_offset, 3);

        let identity = SurfaceSeries {
            start_min: 0,
            taxiing: n.clone(),
            takeoff_rate: n.iter().map(|&v| f64::from(v)).collect(),
        };
        let scan = correlation_scan(&identity, -6..=6).unwrap();
        assert_eq!(scan.best_offset, 0);
        let at_zero = scan
            .by_offset
            .iter()
            .find(|(dt, _)| *dt == 0)
            .and_then(|(_, c)| *c)
            .unwrap();
        assert_relative_eq!(at_zero, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn constant_series_is_flagged() {
        let series = SurfaceSeries::<f64> {
            start_min: 0,
            taxiing: vec![4; 50],
            takeoff_rate: vec![0.5; 50],
        };
        assert!(matches!(
            correlation_scan(&series, -3..=3),
            Err(CalibrationError::ConstantSeries)
        ));
    }

    fn curve_from(means: &[f64]) -> ThroughputCurve<f64> {
        ThroughputCurve {
            entries: means
                .iter()
                .enumerate()
                .map(|(n, &m)| ThroughputEntry {
                    n: n as u32,
                    mean_rate: m,
                    std_rate: 0.0,
                    sample_count: 10,
                })
                .collect(),
        }
    }

    #[test]
    fn flat_curve_saturates_at_minimum() {
        let curve = curve_from(&[0.5; 20]);
        assert_eq!(detect_saturation(&curve, 0.01, 3).unwrap(), 0);
    }

    #[test]
    fn piecewise_linear_knee_at_15() {
        let means: Vec<f64> = (0..=25)
            .map(|n| if n <= 15 { 0.04 * f64::from(n) } else { 0.6 })
            .collect();
        let curve = curve_from(&means);
        assert_eq!(detect_saturation(&curve, 0.01, 3).unwrap(), 15);
    }

    #[test]
    fn never_saturating_curve_errors() {
        let means: Vec<f64> = (0..=20).map(|n| 0.05 * f64::from(n)).collect();
        let curve = curve_from(&means);
        assert!(matches!(
            detect_saturation(&curve, 0.01, 3),
            Err(CalibrationError::NoSaturation)
        ));
    }

    #[test]
    fn hub_like_knee_near_40() {
        let means: Vec<f64> = (0..=55)
            .map(|n| if n <= 40 { 0.03 * f64::from(n) } else { 1.2 })
            .collect();
        let curve = curve_from(&means);
        let n_star = detect_saturation(&curve, 0.01, 3).unwrap();
        assert!((38..=42).contains(&n_star), "n_star={n_star}");
    }

    #[test]
    fn raising_threshold_never_raises_n_star() {
        let means: Vec<f64> = (0..=30)
            .map(|n| 0.6 * (1.0 - (-0.15 * f64::from(n)).exp()))
            .collect();
        let curve = curve_from(&means);
        let mut last = u32::MAX;
        for threshold in [0.002, 0.005, 0.01, 0.02, 0.05] {
            let n = detect_saturation(&curve, threshold, 3).unwrap_or(0);
            assert!(n <= last);
            last = n;
        }
    }
}
