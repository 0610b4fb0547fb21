//! Maximum-likelihood lognormal fit of nominal taxi-out times.

use super::{CalibrationError, TaxiFit};
use crate::scalar::Scalar;

const MIN_SAMPLES: usize = 30;
/// Floor keeps the fitted distribution sampleable when all inputs coincide.
const SIGMA_FLOOR: f64 = 1e-6;

/// Fits a lognormal to taxi-out minutes already filtered to light traffic
/// (low surface count at push-back). Needs at least 30 positive samples.
pub fn fit_taxi_lognormal<S: Scalar>(
    terminal: &str,
    taxi_minutes: &[S],
) -> Result<TaxiFit<S>, CalibrationError> {
    if taxi_minutes.len() < MIN_SAMPLES {
        return Err(CalibrationError::TooFewSamples {
            got: taxi_minutes.len(),
            need: MIN_SAMPLES,
        });
    }
    let mut logs = Vec::with_capacity(taxi_minutes.len());
    for &x in taxi_minutes {
        if x <= S::zero() {
            return Err(CalibrationError::NonPositiveTaxiTime(
                x.to_f64().unwrap_or(f64::NAN),
            ));
        }
        logs.push(x.ln());
    }
    let n = S::from_usize(logs.len()).unwrap();
    let mu = logs.iter().copied().sum::<S>() / n;
    let var = logs.iter().map(|&l| (l - mu) * (l - mu)).sum::<S>() / n;
    let sigma = var.sqrt().max(S::from_f64_lossy(SIGMA_FLOOR));
    Ok(TaxiFit {
        terminal: terminal.to_string(),
        mu_log: mu,
        sigma_log: sigma,
        sample_count: taxi_minutes.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use rand_distr::{Distribution, LogNormal};

    #[test]
    fn constant_samples_hit_the_sigma_floor() {
        let samples = vec![std::f64::consts::E; 40];
        let fit = fit_taxi_lognormal("A", &samples).unwrap();
        assert!((fit.mu_log - 1.0).abs() < 1e-12);
        assert!((fit.sigma_log - 1e-6).abs() < 1e-12);
    }

    #[test]
    fn recovers_known_generator() {
        let mut rng = stream_rng(99, 5);
        let dist = LogNormal::new(2.5, 0.3).unwrap();
        let samples: Vec<f64> = (0..10_000).map(|_| dist.sample(&mut rng)).collect();
        let fit = fit_taxi_lognormal("B", &samples).unwrap();
        assert!((fit.mu_log - 2.5).abs() < 0.02, "mu={}", fit.mu_log);
        assert!((fit.sigma_log - 0.3).abs() < 0.02, "sigma={}", fit.sigma_log);
    }

    #[test]
    fn error_shrinks_with_sample_count() {
        let dist = LogNormal::new(2.0, 0.4).unwrap();
        let mut errors = Vec::new();
        for (i, n) in [1_000usize, 100_000].into_iter().enumerate() {
            let mut rng = stream_rng(7, 10 + i as u64);
            let samples: Vec<f64> = (0..n).map(|_| dist.sample(&mut rng)).collect();
            let fit = fit_taxi_lognormal("C", &samples).unwrap();
            errors.push((fit.mu_log - 2.0).abs() + (fit.sigma_log - 0.4).abs());
        }
        assert!(errors[1] < errors[0], "errors={errors:?}");
    }

    #[test]
    fn too_few_samples_is_an_error() {
        let samples = vec![10.0f64; 29];
        assert!(matches!(
            fit_taxi_lognormal("D", &samples),
            Err(CalibrationError::TooFewSamples { got: 29, need: 30 })
        ));
    }

    #[test]
    fn non_positive_samples_are_rejected() {
        let mut samples = vec![10.0f64; 40];
        samples[7] = 0.0;
        assert!(matches!(
            fit_taxi_lognormal("D", &samples),
            Err(CalibrationError::NonPositiveTaxiTime(_))
        ));
    }
}
