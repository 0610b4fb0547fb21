//! Grid search for the runway service parameters.
//!
//! For every rate triple on the grid the two probabilities follow in closed
//! form from the mean and window-σ targets (a 2x2 linear system). Feasible
//! candidates all match both moments exactly, so the winner is the one whose
//! simulated 10-minute take-off-count distribution is closest, in total
//! variation distance, to the target count histogram.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CalibrationError, TakeoffParams, RATE_WINDOW_MIN};
use crate::rng::stream_rng;
use crate::scalar::Scalar;
use crate::takeoff::RunwayProcess;

const PROBABILITY_SLACK: f64 = 1e-9;
/// Internal stream id for candidate simulation; every candidate replays the
/// same draws so the distance comparison is fair and deterministic.
const STREAM_GRID: u64 = 2;
const GRID_SIM_WINDOWS: usize = 600;

/// Calibration target: the first two moments of the take-off rate plus,
/// optionally, the empirical distribution of 10-minute take-off counts.
/// Without a histogram a discretized normal with the same moments is used.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RateTarget<S> {
    pub mu: S,
    pub sigma: S,
    /// `count_histogram[k]` = probability of k take-offs in a 10-minute
    /// window; need not be normalized.
    pub count_histogram: Option<Vec<S>>,
}

impl<S: Scalar> RateTarget<S> {
    pub fn from_moments(mu: S, sigma: S) -> Self {
        Self {
            mu,
            sigma,
            count_histogram: None,
        }
    }

    fn target_histogram(&self, bins: usize) -> Vec<f64> {
        match &self.count_histogram {
            Some(h) => {
                let mut probs: Vec<f64> =
                    h.iter().map(|p| p.to_f64().unwrap_or(0.0).max(0.0)).collect();
                probs.resize(bins.max(probs.len()), 0.0);
                normalize(&mut probs);
                probs
            }
            None => {
                // Discretized normal over integer counts with matching moments.
                let mean = self.mu.to_f64().unwrap() * RATE_WINDOW_MIN as f64;
                let std = (self.sigma.to_f64().unwrap() * RATE_WINDOW_MIN as f64).max(1e-9);
                let mut probs: Vec<f64> = (0..bins)
                    .map(|k| {
                        let z = (k as f64 - mean) / std;
                        (-0.5 * z * z).exp()
                    })
                    .collect();
                normalize(&mut probs);
                probs
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TakeoffFit<S> {
    pub params: TakeoffParams<S>,
    /// Total variation distance between the simulated and target
    /// 10-minute count distributions.
    pub distance: S,
}

/// Solves the mean and window-σ identities for `(p1, p2)` given the rates.
///
/// Returns `None` when the solution is outside the probability simplex or
/// the rates are too degenerate to determine it.
pub fn solve_probabilities<S: Scalar>(c1: S, c2: S, c3: S, mu: S, sigma: S) -> Option<(S, S)> {
    let ten = S::from_usize(RATE_WINDOW_MIN).unwrap();
    let second_moment = ten * sigma * sigma + mu * mu;

    let a11 = c1 - c3;
    let a12 = c2 - c3;
    let b1 = mu - c3;
    let a21 = c1 * c1 - c3 * c3;
    let a22 = c2 * c2 - c3 * c3;
    let b2 = second_moment - c3 * c3;

    let det = a11 * a22 - a12 * a21;
    if det.abs() < S::from_f64_lossy(1e-12) {
        // Fully degenerate rates can only represent a zero-variance target.
        if c1 == c2 && c2 == c3 {
            let close = (mu - c1).abs() <= S::from_f64_lossy(1e-9)
                && sigma.abs() <= S::from_f64_lossy(1e-9);
            if close {
                let third = S::from_f64_lossy(1.0 / 3.0);
                return Some((third, third));
            }
        }
        return None;
    }

    let p1 = (b1 * a22 - b2 * a12) / det;
    let p2 = (a11 * b2 - a21 * b1) / det;
    let slack = S::from_f64_lossy(PROBABILITY_SLACK);
    if p1 < -slack || p2 < -slack || p1 + p2 > S::one() + slack {
        return None;
    }
    Some((
        p1.max(S::zero()).min(S::one()),
        p2.max(S::zero()).min(S::one()),
    ))
}

/// Grid-searches rate triples in `[step, c_max]` and returns the feasible
/// candidate closest to the target count distribution; ties break toward
/// the lexicographically smallest `(c1, c2, c3)`.
pub fn fit_takeoff_params<S: Scalar>(
    target: &RateTarget<S>,
    step: S,
    c_max: S,
) -> Result<TakeoffFit<S>, CalibrationError> {
    let step_f = step.to_f64().unwrap();
    let c_max_f = c_max.to_f64().unwrap();
    if !(step_f > 0.0) || c_max_f < step_f {
        return Err(CalibrationError::InvalidParams(
            "grid step must be positive and below c_max".into(),
        ));
    }
    let levels = (c_max_f / step_f).round() as usize;
    let bins = (target.mu.to_f64().unwrap() * RATE_WINDOW_MIN as f64
        + 6.0 * target.sigma.to_f64().unwrap() * RATE_WINDOW_MIN as f64)
        .ceil()
        .max(4.0) as usize
        + 1;
    let target_hist = target.target_histogram(bins);

    // The model is symmetric under permuting (c_i, p_i) pairs, so it is
    // enough to scan ordered triples i <= j <= k.
    let candidates: Vec<(usize, usize, usize)> = (1..=levels)
        .flat_map(|i| (i..=levels).flat_map(move |j| (j..=levels).map(move |k| (i, j, k))))
        .collect();

    let best = candidates
        .par_iter()
        .filter_map(|&(i, j, k)| {
            let c1 = step * S::from_usize(i).unwrap();
            let c2 = step * S::from_usize(j).unwrap();
            let c3 = step * S::from_usize(k).unwrap();
            let (p1, p2) = solve_probabilities(c1, c2, c3, target.mu, target.sigma)?;
            let params = TakeoffParams { c1, c2, c3, p1, p2 };
            let hist = simulated_count_histogram(&params, target_hist.len());
            let distance = total_variation(&hist, &target_hist);
            Some(((i, j, k), params, distance))
        })
        .min_by(|a, b| {
            a.2.partial_cmp(&b.2)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| a.0.cmp(&b.0))
        });

    match best {
        Some((_, params, distance)) => Ok(TakeoffFit {
            params,
            distance: S::from_f64_lossy(distance),
        }),
        None => Err(CalibrationError::NoFeasibleParams),
    }
}

/// Distribution of take-off counts over consecutive saturated 10-minute
/// windows, simulated with a fixed internal seed.
pub fn simulated_count_histogram<S: Scalar>(params: &TakeoffParams<S>, bins: usize) -> Vec<f64> {
    let mut process = RunwayProcess::new(*params, stream_rng(0x9a7e_201d, STREAM_GRID));
    let mut counts = vec![0usize; bins];
    for _ in 0..GRID_SIM_WINDOWS {
        let mut cleared = 0usize;
        for _ in 0..RATE_WINDOW_MIN {
            cleared += process.step(usize::MAX);
        }
        counts[cleared.min(bins - 1)] += 1;
    }
    let mut probs: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    normalize(&mut probs);
    probs
}

fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

fn normalize(probs: &mut [f64]) {
    let total: f64 = probs.iter().sum();
    if total > 0.0 {
        for p in probs.iter_mut() {
            *p /= total;
        }
    }
}

/// Empirical histogram of 10-minute take-off counts from rate samples
/// (each sample is a window rate in aircraft/min).
pub fn count_histogram_from_rates<S: Scalar>(rates: &[S]) -> Vec<S> {
    let mut counts: Vec<usize> = Vec::new();
    for r in rates {
        let k = (r.to_f64().unwrap() * RATE_WINDOW_MIN as f64).round().max(0.0) as usize;
        if k >= counts.len() {
            counts.resize(k + 1, 0);
        }
        counts[k] += 1;
    }
    let total = rates.len().max(1);
    counts
        .into_iter()
        .map(|c| S::from_f64_lossy(c as f64 / total as f64))
        .collect()
}
