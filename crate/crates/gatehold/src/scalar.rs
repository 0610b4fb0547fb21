//! Scalar abstraction for the numeric kernels.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar the math kernels are generic over: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, for constants and RNG draws.
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("f64 conversion")
    }

    /// Lossy conversion from an integer minute count.
    fn from_minutes(v: i64) -> Self {
        Self::from_i64(v).expect("i64 conversion")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Mean of a slice; zero for empty input.
pub fn mean<S: Scalar>(values: &[S]) -> S {
    if values.is_empty() {
        return S::zero();
    }
    values.iter().copied().sum::<S>() / S::from_usize(values.len()).unwrap()
}

/// Population standard deviation of a slice; zero for fewer than two values.
pub fn std_dev<S: Scalar>(values: &[S]) -> S {
    if values.len() < 2 {
        return S::zero();
    }
    let m = mean(values);
    let var = values
        .iter()
        .map(|&v| (v - m) * (v - m))
        .sum::<S>()
        / S::from_usize(values.len()).unwrap();
    var.sqrt()
}

/// Pearson correlation of two equal-length series.
///
/// Returns `None` when either series is constant (undefined correlation).
pub fn pearson<S: Scalar>(xs: &[S], ys: &[S]) -> Option<S> {
    assert_eq!(xs.len(), ys.len(), "series must align");
    if xs.len() < 2 {
        return None;
    }
    let mx = mean(xs);
    let my = mean(ys);
    let mut sxy = S::zero();
    let mut sxx = S::zero();
    let mut syy = S::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxy = sxy + dx * dy;
        sxx = sxx + dx * dx;
        syy = syy + dy * dy;
    }
    if sxx == S::zero() || syy == S::zero() {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn mean_and_std() {
        let xs = [1.0f64, 2.0, 3.0, 4.0];
        assert_relative_eq!(mean(&xs), 2.5);
        assert_relative_eq!(std_dev(&xs), (1.25f64).sqrt());
    }

    #[test]
    fn pearson_perfect_and_constant() {
        let xs = [1.0f64, 2.0, 3.0];
        let ys = [2.0f64, 4.0, 6.0];
        assert_relative_eq!(pearson(&xs, &ys).unwrap(), 1.0, epsilon = 1e-12);
        let zs = [5.0f64, 5.0, 5.0];
        assert!(pearson(&xs, &zs).is_none());
    }

    #[test]
    fn generic_over_f32() {
        let xs = [1.0f32, 2.0, 3.0];
        assert!((mean(&xs) - 2.0).abs() < 1e-6);
    }
}
