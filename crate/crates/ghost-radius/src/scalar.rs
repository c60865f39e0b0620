//! Scalar abstraction for the numeric core.
//!
//! Everything in the math modules is generic over [`Real`], which is
//! `f32`/`f64` plus the error function. The `f64` aliases at the crate root
//! are the intended entry points; `f32` lacks the precision for the
//! zero-finding cross-checks but is useful for size/speed experiments.

use num_traits::{Float, FloatConst};
use std::fmt::{Debug, Display};

pub trait Real: Float + FloatConst + Debug + Display + Send + Sync + 'static {
    /// Error function.
    fn erf(self) -> Self;

    /// Conversion from `f64`, for constants.
    fn of(x: f64) -> Self;

    fn as_f64(self) -> f64;
}

impl Real for f64 {
    fn erf(self) -> Self {
        libm::erf(self)
    }
    fn of(x: f64) -> Self {
        x
    }
    fn as_f64(self) -> f64 {
        self
    }
}

impl Real for f32 {
    fn erf(self) -> Self {
        libm::erff(self)
    }
    fn of(x: f64) -> Self {
        x as f32
    }
    fn as_f64(self) -> f64 {
        self as f64
    }
}

/// `log(sum_i exp(x_i))` with max-shift stabilization.
pub fn log_sum_exp<R: Real>(xs: &[R]) -> R {
    let m = xs.iter().cloned().fold(R::neg_infinity(), R::max);
    if !m.is_finite() {
        return m;
    }
    let s = xs
        .iter()
        .map(|&x| (x - m).exp())
        .fold(R::zero(), |a, b| a + b);
    m + s.ln()
}

pub fn softmax<R: Real>(xs: &[R]) -> Vec<R> {
    let k = log_sum_exp(xs);
    xs.iter().map(|&x| (x - k).exp()).collect()
}

pub fn norm<R: Real>(xs: &[R]) -> R {
    xs.iter()
        .map(|&x| x * x)
        .fold(R::zero(), |a, b| a + b)
        .sqrt()
}

pub fn dot<R: Real>(a: &[R], b: &[R]) -> R {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&x, &y)| x * y)
        .fold(R::zero(), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lse_matches_naive_in_safe_range() {
        let xs = [0.3, -1.2, 2.0, 0.0];
        let naive: f64 = xs.iter().map(|x| x.exp()).sum::<f64>().ln();
        assert!((log_sum_exp(&xs) - naive).abs() < 1e-14);
    }

    #[test]
    fn lse_survives_large_logits() {
        let xs = [1000.0, 1001.0f64];
        let got = log_sum_exp(&xs);
        assert!((got - (1001.0 + (1.0 + (-1.0f64).exp()).ln())).abs() < 1e-12);
    }

    #[test]
    fn softmax_sums_to_one() {
        let p = softmax(&[3.0, -2.0, 0.5, 700.0f64]);
        let s: f64 = p.iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn erf_reference_values() {
        // erf(1) from standard tables.
        assert!((Real::erf(1.0f64) - 0.842_700_792_949_714_9).abs() < 1e-15);
        assert!((Real::erf(0.0f64)).abs() < 1e-300);
    }
}
