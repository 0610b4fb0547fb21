//! Expected gate-conflict overlap as a function of gate separation.
//!
//! With the earlier flight's scheduled departure normalized to 0 and the
//! later flight's scheduled arrival at `sep`, the overlap of their actual
//! gate uses is `(D_dep - D_arr - sep)+` where the `D`s are the empirical
//! delay distributions. The curve of its expectation over `sep` is fit to
//! `A * B^sep`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;
use crate::Minutes;

/// Default support for empirical delay histograms, minutes.
pub const DELAY_SUPPORT: (Minutes, Minutes) = (-60, 240);

/// An empirical distribution over integer minutes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelayHistogram<S> {
    /// Delay value of bin 0.
    pub offset_min: Minutes,
    /// Normalized bin probabilities at 1-minute resolution.
    pub probs: Vec<S>,
}

impl<S: Scalar> DelayHistogram<S> {
    /// Bins samples at 1-minute resolution over `support`, clamping
    /// outliers to the boundary bins.
    pub fn from_samples(
        samples: &[Minutes],
        support: (Minutes, Minutes),
    ) -> Result<Self, OverlapError> {
        if samples.is_empty() {
            return Err(OverlapError::EmptyDistribution);
        }
        let (lo, hi) = support;
        assert!(lo < hi, "support must be non-degenerate");
        let mut counts = vec![0usize; (hi - lo + 1) as usize];
        for &s in samples {
            let idx = (s.clamp(lo, hi) - lo) as usize;
            counts[idx] += 1;
        }
        let total = S::from_usize(samples.len()).unwrap();
        Ok(Self {
            offset_min: lo,
            probs: counts
                .into_iter()
                .map(|c| S::from_usize(c).unwrap() / total)
                .collect(),
        })
    }

    pub fn point_mass(value: Minutes) -> Self {
        Self {
            offset_min: value,
            probs: vec![S::one()],
        }
    }

    /// From raw bin weights; normalizes.
    pub fn from_weights(offset_min: Minutes, weights: &[S]) -> Result<Self, OverlapError> {
        let total = weights.iter().copied().sum::<S>();
        if weights.is_empty() || total <= S::zero() {
            return Err(OverlapError::EmptyDistribution);
        }
        Ok(Self {
            offset_min,
            probs: weights.iter().map(|&w| w / total).collect(),
        })
    }

    pub fn mean(&self) -> S {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, &p)| S::from_minutes(self.offset_min + i as Minutes) * p)
            .sum()
    }

    fn iter(&self) -> impl Iterator<Item = (Minutes, S)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, &p)| (self.offset_min + i as Minutes, p))
    }
}

/// Departure and arrival delay distributions (signed minutes).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelayDistributions<S> {
    pub departure: DelayHistogram<S>,
    pub arrival: DelayHistogram<S>,
}

/// Expected overlap at one separation, in both normalizations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapPoint<S> {
    pub sep_min: Minutes,
    /// Probability-weighted expectation `E[(overlap)+]`.
    pub unconditional: S,
    /// Expectation conditioned on a conflict occurring.
    pub conditional: S,
    /// Probability that the flights' gate uses overlap at all.
    pub conflict_probability: S,
}

/// Unconditional expected overlap duration at the given separation.
pub fn expected_overlap<S: Scalar>(dists: &DelayDistributions<S>, sep: Minutes) -> S {
    overlap_at(dists, sep).unconditional
}

/// Expected overlap at one separation with both normalizations.
pub fn overlap_at<S: Scalar>(dists: &DelayDistributions<S>, sep: Minutes) -> OverlapPoint<S> {
    assert!(sep >= 0, "separation must be non-negative");
    let mut weighted = S::zero();
    let mut prob = S::zero();
    for (d, pd) in dists.departure.iter() {
        if pd <= S::zero() {
            continue;
        }
        for (a, pa) in dists.arrival.iter() {
            let gap = d - a - sep;
            if gap > 0 {
                let w = pd * pa;
                weighted = weighted + w * S::from_minutes(gap);
                prob = prob + w;
            }
        }
    }
    let conditional = if prob > S::zero() {
        weighted / prob
    } else {
        S::zero()
    };
    OverlapPoint {
        sep_min: sep,
        unconditional: weighted,
        conditional,
        conflict_probability: prob,
    }
}

/// Expected-overlap table over a separation range, 1-minute steps.
pub fn overlap_table<S: Scalar>(
    dists: &DelayDistributions<S>,
    max_sep: Minutes,
) -> Vec<OverlapPoint<S>> {
    (0..=max_sep).map(|sep| overlap_at(dists, sep)).collect()
}

/// Log-linear least-squares fit of `overlap = A * B^sep`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialFit<S> {
    pub a: S,
    pub b: S,
    /// Root-mean-square residual in log space.
    pub log_rmse: S,
    pub r_squared: S,
    pub points_used: usize,
}

/// Fits `log(overlap) = log A + sep * log B` over the positive table points.
pub fn fit_exponential<S: Scalar>(
    table: &[(Minutes, S)],
) -> Result<ExponentialFit<S>, OverlapError> {
    let points: Vec<(S, S)> = table
        .iter()
        .filter(|(_, v)| *v > S::zero())
        .map(|&(sep, v)| (S::from_minutes(sep), v.ln()))
        .collect();
    if points.is_empty() {
        return Err(OverlapError::DegenerateTable);
    }
    let mut distinct: Vec<Minutes> = table
        .iter()
        .filter(|(_, v)| *v > S::zero())
        .map(|&(sep, _)| sep)
        .collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(OverlapError::TooFewPoints(distinct.len()));
    }

    let n = S::from_usize(points.len()).unwrap();
    let mean_x = points.iter().map(|p| p.0).sum::<S>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<S>() / n;
    let mut sxy = S::zero();
    let mut sxx = S::zero();
    let mut syy = S::zero();
    for &(x, y) in &points {
        sxy = sxy + (x - mean_x) * (y - mean_y);
        sxx = sxx + (x - mean_x) * (x - mean_x);
        syy = syy + (y - mean_y) * (y - mean_y);
    }
    if sxx == S::zero() {
        return Err(OverlapError::TooFewPoints(1));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;

    let mut sse = S::zero();
    for &(x, y) in &points {
        let resid = y - (intercept + slope * x);
        sse = sse + resid * resid;
    }
    let r_squared = if syy > S::zero() {
        S::one() - sse / syy
    } else {
        S::one()
    };

    Ok(ExponentialFit {
        a: intercept.exp(),
        b: slope.exp(),
        log_rmse: (sse / n).sqrt(),
        r_squared,
        points_used: points.len(),
    })
}

/// The fitted disturbance `A * B^sep` plus the table it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisturbanceModel<S> {
    pub a: S,
    pub b: S,
    pub table: Vec<OverlapPoint<S>>,
}

impl<S: Scalar> DisturbanceModel<S> {
    pub fn new(a: S, b: S, table: Vec<OverlapPoint<S>>) -> Result<Self, OverlapError> {
        if a < S::zero() || b <= S::zero() || b > S::one() {
            return Err(OverlapError::InvalidModel {
                a: a.to_f64().unwrap_or(f64::NAN),
                b: b.to_f64().unwrap_or(f64::NAN),
            });
        }
        let mut prev = S::infinity();
        for point in &table {
            if point.unconditional < S::zero() || point.unconditional > prev {
                return Err(OverlapError::NonMonotoneTable(point.sep_min));
            }
            prev = point.unconditional;
        }
        Ok(Self { a, b, table })
    }

    /// Expected overlap `A * B^sep` for a non-negative separation.
    pub fn eval(&self, sep: Minutes) -> S {
        self.a * self.b.powi(sep.max(0) as i32)
    }
}

#[derive(Debug, Error)]
pub enum OverlapError {
    #[error("degenerate table: all overlap values are zero")]
    DegenerateTable,
    #[error("need at least 3 distinct separations with positive overlap, got {0}")]
    TooFewPoints(usize),
    #[error("empty delay distribution")]
    EmptyDistribution,
    #[error("invalid disturbance model (a={a}, b={b})")]
    InvalidModel { a: f64, b: f64 },
    #[error("overlap table not non-increasing at separation {0}")]
    NonMonotoneTable(Minutes),
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn point_masses(dep: Minutes, arr: Minutes) -> DelayDistributions<f64> {
        DelayDistributions {
            departure: DelayHistogram::point_mass(dep),
            arrival: DelayHistogram::point_mass(arr),
        }
    }

    #[test]
    fn no_delays_no_overlap() {
        let dists = point_masses(0, 0);
        assert_eq!(expected_overlap(&dists, 10), 0.0);
    }

    #[test]
    fn deterministic_geometry() {
        // Departure 15 late, arrival on time, separation 10: 5 minutes overlap.
        let dists = point_masses(15, 0);
        assert_relative_eq!(expected_overlap(&dists, 10), 5.0);
        let point = overlap_at(&dists, 10);
        assert_relative_eq!(point.conditional, 5.0);
        assert_relative_eq!(point.conflict_probability, 1.0);
    }

    #[test]
    fn overlap_is_non_increasing_in_separation() {
        let dep = DelayHistogram::from_samples(&[-5, 0, 3, 12, 25, 40, 40, 7], DELAY_SUPPORT)
            .unwrap();
        let arr =
            DelayHistogram::from_samples(&[-12, -3, 0, 1, 8, 20, 2, -7], DELAY_SUPPORT).unwrap();
        let dists = DelayDistributions {
            departure: dep,
            arrival: arr,
        };
        let mut prev = f64::INFINITY;
        for sep in 0..=80 {
            let v = expected_overlap(&dists, sep);
            assert!(v >= 0.0);
            assert!(v <= prev + 1e-12);
            prev = v;
        }
        // Finite support: far separations cannot overlap at all.
        assert_eq!(expected_overlap(&dists, 500), 0.0);
    }

    #[test]
    fn exact_exponential_recovered() {
        let table: Vec<(Minutes, f64)> =
            (0..=120).map(|s| (s, 8.0 * 0.97f64.powi(s as i32))).collect();
        let fit = fit_exponential(&table).unwrap();
        assert_relative_eq!(fit.a, 8.0, epsilon = 1e-9);
        assert_relative_eq!(fit.b, 0.97, epsilon = 1e-9);
        assert!(fit.log_rmse < 1e-12);
    }

    #[test]
    fn constant_table_gives_b_one() {
        let table: Vec<(Minutes, f64)> = (0..=20).map(|s| (s, 3.5)).collect();
        let fit = fit_exponential(&table).unwrap();
        assert_relative_eq!(fit.a, 3.5, epsilon = 1e-12);
        assert_relative_eq!(fit.b, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn noisy_exponential_recovered_loosely() {
        // Deterministic +/- noise of magnitude 0.01 on 5 * 0.9^x.
        let table: Vec<(Minutes, f64)> = (0..=40)
            .map(|s| {
                let noise = if s % 2 == 0 { 0.01 } else { -0.01 };
                (s, 5.0 * 0.9f64.powi(s as i32) + noise)
            })
            .collect();
        let fit = fit_exponential(&table).unwrap();
        assert!((fit.a - 5.0).abs() < 0.05, "a={}", fit.a);
        assert!((fit.b - 0.9).abs() < 0.05, "b={}", fit.b);
    }

    #[test]
    fn all_zero_table_is_degenerate() {
        let table: Vec<(Minutes, f64)> = (0..=20).map(|s| (s, 0.0)).collect();
        assert!(matches!(
            fit_exponential(&table),
            Err(OverlapError::DegenerateTable)
        ));
    }

    #[test]
    fn scaling_overlaps_scales_a_only() {
        let table: Vec<(Minutes, f64)> = (0..=60)
            .map(|s| (s, 4.0 * 0.95f64.powi(s as i32) * (1.0 + 0.002 * f64::from(s as i32 % 5))))
            .collect();
        let scaled: Vec<(Minutes, f64)> = table.iter().map(|&(s, v)| (s, 7.0 * v)).collect();
        let fit = fit_exponential(&table).unwrap();
        let fit_scaled = fit_exponential(&scaled).unwrap();
        assert_relative_eq!(fit_scaled.a, 7.0 * fit.a, epsilon = 1e-9);
        assert_relative_eq!(fit_scaled.b, fit.b, epsilon = 1e-12);
    }

    #[test]
    fn disturbance_model_validates() {
        assert!(DisturbanceModel::new(8.0, 0.97, vec![]).is_ok());
        assert!(DisturbanceModel::new(-1.0, 0.97, vec![]).is_err());
        assert!(DisturbanceModel::new(8.0, 1.2, vec![]).is_err());
        let model = DisturbanceModel::new(8.0, 0.97, vec![]).unwrap();
        assert_relative_eq!(model.eval(0), 8.0);
        assert_relative_eq!(model.eval(10), 8.0 * 0.97f64.powi(10));
    }
}
