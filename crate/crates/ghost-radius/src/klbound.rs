//! KL divergence along a softmax logit path and its sharp cubic remainder.
//!
//! For `p(tau) = softmax(z + tau a)`, the divergence `KL(p(tau) || p(0))`
//! equals the Bregman gap of the log-partition `K(tau) = lse(z + tau a)`,
//! its quadratic approximation is `tau^2/2 Var_{p(0)}(a)`, and the error is
//! bounded by `|tau|^3 Delta_a^3 / (18 sqrt 3)` with a sharp constant
//! attained by a two-point distribution.

use crate::scalar::{log_sum_exp, softmax, Real};
use crate::{Error, Result};

/// Softmax logit path `p(tau) = softmax(z + tau a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftmaxPath<R> {
    pub z: Vec<R>,
    pub a: Vec<R>,
}

impl<R: Real> SoftmaxPath<R> {
    pub fn new(z: Vec<R>, a: Vec<R>) -> Result<Self> {
        if z.len() != a.len() || z.len() < 2 {
            return Err(Error::Dimension(
                "path needs equal-length logits and slopes, >= 2 classes".into(),
            ));
        }
        Ok(Self { z, a })
    }

    pub fn spread(&self) -> R {
        let max = self.a.iter().cloned().fold(R::neg_infinity(), R::max);
        let min = self.a.iter().cloned().fold(R::infinity(), R::min);
        max - min
    }

    fn logits_at(&self, tau: R) -> Vec<R> {
        self.z
            .iter()
            .zip(&self.a)
            .map(|(&z, &a)| z + tau * a)
            .collect()
    }

    /// Log-partition `K(tau) = lse(z + tau a)`.
    pub fn log_partition(&self, tau: R) -> R {
        log_sum_exp(&self.logits_at(tau))
    }
}

/// Divergence between the pre- and post-step softmax distributions by direct
/// summation over stabilized log-probs:
/// `sum_k p_k(0) (log p_k(0) - log p_k(tau))`.
pub fn kl_exact<R: Real>(path: &SoftmaxPath<R>, tau: R) -> R {
    let k0 = path.log_partition(R::zero());
    let kt = path.log_partition(tau);
    let mut acc = R::zero();
    for (&z, &a) in path.z.iter().zip(&path.a) {
        let lp_0 = z - k0;
        let lp_t = z + tau * a - kt;
        acc = acc + lp_0.exp() * (lp_0 - lp_t);
    }
    acc
}

/// Bregman gap of the log-partition: `K(tau) - K(0) - tau K'(0)` with
/// `K'(0) = E_{p(0)}[a]`. Identical to [`kl_exact`] for exponential families.
pub fn kl_bregman<R: Real>(path: &SoftmaxPath<R>, tau: R) -> R {
    let p0 = softmax(&path.z);
    let mean = p0
        .iter()
        .zip(&path.a)
        .map(|(&p, &a)| p * a)
        .fold(R::zero(), |x, y| x + y);
    path.log_partition(tau) - path.log_partition(R::zero()) - tau * mean
}

/// Quadratic model `tau^2/2 Var_{p(0)}(a)`.
pub fn kl_quadratic<R: Real>(path: &SoftmaxPath<R>, tau: R) -> R {
    R::of(0.5) * tau * tau * slope_variance(path)
}

/// `Var_{p(0)}(a)`; bounded by `Delta_a^2 / 4` (Popoviciu).
pub fn slope_variance<R: Real>(path: &SoftmaxPath<R>) -> R {
    let p0 = softmax(&path.z);
    let mean = p0
        .iter()
        .zip(&path.a)
        .map(|(&p, &a)| p * a)
        .fold(R::zero(), |x, y| x + y);
    p0.iter()
        .zip(&path.a)
        .map(|(&p, &a)| p * (a - mean) * (a - mean))
        .fold(R::zero(), |x, y| x + y)
}

/// Sharp cubic remainder bound `|tau|^3 Delta_a^3 / (18 sqrt 3)`.
pub fn remainder_bound<R: Real>(tau: R, delta_a: R) -> R {
    let c = R::of(18.0) * R::of(3.0).sqrt();
    (tau.abs() * delta_a).powi(3) / c
}

/// The two-point distribution maximizing the third central moment on an
/// interval of width `delta`: returns `(p_star, moment)` with
/// `p_star = (3 - sqrt 3)/6` and moment `delta^3 p(1-p)(1-2p) = delta^3/(6
/// sqrt 3)`.
pub fn third_moment_witness<R: Real>(delta: R) -> Result<(R, R)> {
    if !(delta > R::zero()) {
        return Err(Error::Config("interval width must be positive".into()));
    }
    let p = (R::of(3.0) - R::of(3.0).sqrt()) / R::of(6.0);
    Ok((p, two_point_third_moment(delta, p)))
}

/// Third central moment of `X in {0, delta}` with `P(X = delta) = p`.
pub fn two_point_third_moment<R: Real>(delta: R, p: R) -> R {
    delta.powi(3) * p * (R::one() - p) * (R::one() - R::of(2.0) * p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_path(rng: &mut ChaCha8Rng) -> SoftmaxPath<f64> {
        let n = rng.gen_range(2..=10);
        let z: Vec<f64> = (0..n).map(|_| rng.gen_range(-9.0..9.0)).collect();
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        SoftmaxPath::new(z, a).unwrap()
    }

    #[test]
    fn kl_zero_at_zero_step() {
        let path = SoftmaxPath::new(vec![0.3, -1.0, 2.0], vec![1.0, 0.0, -0.5]).unwrap();
        assert_eq!(kl_exact(&path, 0.0), 0.0);
        assert_eq!(kl_bregman(&path, 0.0), 0.0);
        assert_eq!(kl_quadratic(&path, 0.0), 0.0);
    }

    #[test]
    fn kl_exact_matches_direct_summation() {
        // Small 2-class case against a from-scratch evaluation.
        let path = SoftmaxPath::new(vec![0.0, 0.0], vec![0.0, 1.0]).unwrap();
        let tau = 0.1;
        let p0 = [0.5, 0.5];
        let e = [0.0f64.exp(), 0.1f64.exp()];
        let s: f64 = e.iter().sum();
        let pt = [e[0] / s, e[1] / s];
        let oracle: f64 = p0
            .iter()
            .zip(&pt)
            .map(|(&p0, &pt)| p0 * (p0 / pt).ln())
            .sum();
        assert!((kl_exact(&path, tau) - oracle).abs() < 1e-14);
    }

    #[test]
    fn kl_nonnegative_and_bregman_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let path = random_path(&mut rng);
            let tau: f64 = rng.gen_range(-2.0..2.0);
            let exact = kl_exact(&path, tau);
            assert!(exact >= -1e-13);
            let gap = (exact - kl_bregman(&path, tau)).abs();
            assert!(
                gap < 1e-12 * (1.0 + exact.abs()),
                "gap {gap} at exact {exact}"
            );
        }
    }

    #[test]
    fn bregman_invariant_under_slope_shift() {
        let path = SoftmaxPath::new(vec![0.5, -0.2, 1.0], vec![1.0, -1.0, 0.3]).unwrap();
        let shifted =
            SoftmaxPath::new(vec![0.5, -0.2, 1.0], vec![3.5, 1.5, 2.8]).unwrap();
        for &tau in &[-0.7f64, 0.2, 1.3] {
            assert!((kl_bregman(&path, tau) - kl_bregman(&shifted, tau)).abs() < 1e-12);
        }
    }

    #[test]
    fn quadratic_two_class_uniform() {
        // Uniform p(0), a = (0, d): Var = d^2/4, so KL_quad = tau^2 d^2 / 8.
        let d = 3.0f64;
        let path = SoftmaxPath::new(vec![0.0, 0.0], vec![0.0, d]).unwrap();
        let tau = 0.4;
        assert!((kl_quadratic(&path, tau) - tau * tau * d * d / 8.0).abs() < 1e-14);
    }

    #[test]
    fn variance_respects_popoviciu() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let path = random_path(&mut rng);
            let d = path.spread();
            assert!(slope_variance(&path) <= d * d / 4.0 + 1e-12);
        }
    }

    #[test]
    fn remainder_constant() {
        let b = remainder_bound(1.0, 1.0);
        assert!((b - 1.0 / (18.0 * 3.0f64.sqrt())).abs() < 1e-15);
        assert!((b - 0.03207501495).abs() < 1e-9);
        assert_eq!(remainder_bound(0.0, 5.0), 0.0);
    }

    #[test]
    fn remainder_bound_holds_over_random_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let path = random_path(&mut rng);
            let d = path.spread().max(1e-12);
            let tau = rng.gen_range(-2.0..2.0) / d;
            let gap = (kl_exact(&path, tau) - kl_quadratic(&path, tau)).abs();
            assert!(
                gap <= remainder_bound(tau, path.spread()) + 1e-13,
                "violation: gap {gap}"
            );
        }
    }

    #[test]
    fn third_moment_witness_is_sharp() {
        let (p, m) = third_moment_witness(1.0f64).unwrap();
        assert!((p - 0.21132486540518708).abs() < 1e-15);
        assert!((m - 1.0 / (6.0 * 3.0f64.sqrt())).abs() < 1e-12);
        assert!((m - 0.09622504486).abs() < 1e-9);
        assert_eq!(two_point_third_moment(1.0, 0.5), 0.0);
        // grid scan: nothing beats the witness
        let mut best: f64 = 0.0;
        for i in 0..=10_000 {
            best = best.max(two_point_third_moment(1.0, i as f64 / 10_000.0));
        }
        assert!(best <= m + 1e-9);
    }

    #[test]
    fn scale_consistency() {
        // (a, tau) -> (lambda a, tau / lambda) leaves the divergence alone.
        let path = SoftmaxPath::new(vec![0.2, -0.8, 1.5], vec![2.0, -1.0, 0.5]).unwrap();
        let lam = 3.0;
        let scaled = SoftmaxPath::new(
            path.z.clone(),
            path.a.iter().map(|a| a * lam).collect(),
        )
        .unwrap();
        for &tau in &[0.05f64, 0.4, 1.1] {
            assert!((kl_exact(&path, tau) - kl_exact(&scaled, tau / lam)).abs() < 1e-13);
        }
    }

    #[test]
    fn quadratic_crossover_scales_inversely_with_spread() {
        // Uniform 2-class: remainder_bound exceeds the quadratic when
        // |tau| > Var * 18 sqrt(3) / (2 Delta^3) = 9 sqrt(3) / (2 * 4 Delta),
        // an O(1/Delta) scale.
        let c = 18.0 * 3.0f64.sqrt();
        let mut last = f64::INFINITY;
        for &d in &[1.0f64, 2.0, 5.0, 10.0] {
            let var = d * d / 4.0;
            let crossover = var * c / (2.0 * d.powi(3));
            // analytic form: proportional to 1/Delta
            assert!((crossover * d - c / 8.0).abs() < 1e-12);
            assert!(crossover < last);
            last = crossover;
        }
    }
}
