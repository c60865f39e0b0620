//! Convergence-radius bounds from directional logit derivatives.
//!
//! The spread `Delta_a = max_k a_k - min_k a_k` of the per-class directional
//! derivatives controls everything here: the conservative bound is
//! `rho_a = pi / Delta_a`, the exact per-sample radius is the nearest-zero
//! modulus of the induced exponential sum, and for two classes the two
//! coincide at zero margin.

use crate::expsum::{ComplexPoint, ExpSum, ZeroSearchConfig};
use crate::scalar::{log_sum_exp, Real};
use crate::{Error, Result};
use num_complex::Complex;

/// Per-class directional logit derivatives `a_k = grad z_k . v` for one
/// sample.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalSlopes<R> {
    pub a: Vec<R>,
    pub sample_id: usize,
}

impl<R: Real> DirectionalSlopes<R> {
    pub fn new(a: Vec<R>, sample_id: usize) -> Self {
        Self { a, sample_id }
    }

    /// `max_k a_k - min_k a_k`; invariant under negating all components.
    pub fn spread(&self) -> R {
        let max = self.a.iter().cloned().fold(R::neg_infinity(), R::max);
        let min = self.a.iter().cloned().fold(R::infinity(), R::min);
        max - min
    }
}

/// Current logits and target class for one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct LogitState<R> {
    pub z: Vec<R>,
    pub target: usize,
}

impl<R: Real> LogitState<R> {
    pub fn new(z: Vec<R>, target: usize) -> Result<Self> {
        if target >= z.len() || z.len() < 2 {
            return Err(Error::Dimension(format!(
                "target {} out of range for {} classes",
                target,
                z.len()
            )));
        }
        Ok(Self { z, target })
    }

    /// Strongest non-target competitor, ties broken by lowest class index.
    pub fn top2_competitor(&self) -> usize {
        let mut best = usize::MAX;
        let mut best_z = R::neg_infinity();
        for (k, &zk) in self.z.iter().enumerate() {
            if k == self.target {
                continue;
            }
            if zk > best_z {
                best_z = zk;
                best = k;
            }
        }
        best
    }
}

/// Radius summary for a sample set along one direction.
#[derive(Debug, Clone)]
pub struct RadiusReport<R> {
    /// `pi / delta_a_max`, infinite when all slopes are constant.
    pub rho_a: R,
    /// Exact nearest-zero modulus, when requested.
    pub rho_star: Option<R>,
    /// Location of the nearest ghost, when computed.
    pub ghost: Option<ComplexPoint<R>>,
    /// Sample attaining the maximal spread.
    pub bottleneck_sample: Option<usize>,
    pub delta_a_max: R,
}

/// Exact binary-case radius `sqrt(delta^2 + pi^2) / Delta_a`.
pub fn binary_radius<R: Real>(delta: R, delta_a: R) -> Result<R> {
    if !(delta_a > R::zero()) {
        return Err(Error::DegenerateSpread);
    }
    Ok(delta.hypot(R::PI()) / delta_a)
}

/// Conservative bound `pi / spread`; infinite when the spread vanishes.
pub fn lower_bound<R: Real>(slopes: &DirectionalSlopes<R>) -> R {
    let spread = slopes.spread();
    if spread > R::zero() {
        R::PI() / spread
    } else {
        R::infinity()
    }
}

/// Nearest ghost under the top-2 reduction: `(delta + i pi) / Delta_{y,c}`
/// with margin `delta = z_y - z_c` and slope gap `Delta_{y,c} = a_y - a_c`.
pub fn per_sample_ghost<R: Real>(
    state: &LogitState<R>,
    slopes: &DirectionalSlopes<R>,
) -> Result<(ComplexPoint<R>, R)> {
    if slopes.a.len() != state.z.len() {
        return Err(Error::Dimension("slopes/logits length mismatch".into()));
    }
    let c = state.top2_competitor();
    let delta = state.z[state.target] - state.z[c];
    let gap = slopes.a[state.target] - slopes.a[c];
    if gap == R::zero() {
        return Err(Error::TopTwoDegenerate);
    }
    let ghost = Complex::new(delta / gap, R::PI() / gap);
    Ok((ghost, delta.hypot(R::PI()) / gap.abs()))
}

/// Build the partition exponential sum for one sample: weights
/// `e^{z_k - max z}` (a global factor moves no zeros), slopes `a_k`.
pub fn partition_sum<R: Real>(
    state: &LogitState<R>,
    slopes: &DirectionalSlopes<R>,
) -> Result<ExpSum<R>> {
    if slopes.a.len() != state.z.len() {
        return Err(Error::Dimension("slopes/logits length mismatch".into()));
    }
    let zmax = state.z.iter().cloned().fold(R::neg_infinity(), R::max);
    let weights: Vec<R> = state.z.iter().map(|&z| (z - zmax).exp()).collect();
    // Guard against complete underflow of a weight: the zero structure only
    // needs relative magnitudes, so floor at the smallest positive normal.
    let floor = R::min_positive_value();
    let weights = weights.into_iter().map(|w| w.max(floor)).collect();
    ExpSum::new(weights, slopes.a.clone())
}

/// Exact per-sample radius: nearest-zero modulus of the partition sum.
pub fn exact_radius<R: Real>(
    state: &LogitState<R>,
    slopes: &DirectionalSlopes<R>,
    cfg: &ZeroSearchConfig<R>,
) -> Result<R> {
    let sum = partition_sum(state, slopes)?;
    let (_, modulus) = sum.nearest_zero(cfg)?;
    Ok(modulus)
}

/// Aggregate radius over a sample set: `rho_a = pi / max_x Delta_a(x)`.
///
/// The bottleneck is the argmax sample, ties broken by lowest index. Adding
/// samples can only grow the max, so the bound is monotone non-increasing in
/// the sample set.
pub fn batch_radius<R: Real>(samples: &[DirectionalSlopes<R>]) -> Result<RadiusReport<R>> {
    if samples.is_empty() {
        return Err(Error::NoSamples);
    }
    let mut delta_max = R::zero();
    let mut bottleneck = samples[0].sample_id;
    for s in samples {
        let d = s.spread();
        if d > delta_max {
            delta_max = d;
            bottleneck = s.sample_id;
        }
    }
    let rho_a = if delta_max > R::zero() {
        R::PI() / delta_max
    } else {
        R::infinity()
    };
    Ok(RadiusReport {
        rho_a,
        rho_star: None,
        ghost: None,
        bottleneck_sample: Some(bottleneck),
        delta_a_max: delta_max,
    })
}

/// Dimensionless step `r = tau / rho_a`; zero when the radius is infinite.
pub fn normalized_step<R: Real>(tau: R, rho_a: R) -> R {
    if rho_a.is_infinite() {
        R::zero()
    } else {
        tau / rho_a
    }
}

/// Radius at softmax temperature `T`: `pi T / spread`.
pub fn temperature_radius<R: Real>(slopes: &DirectionalSlopes<R>, temperature: R) -> Result<R> {
    if !(temperature > R::zero()) {
        return Err(Error::InvalidTemperature);
    }
    Ok(lower_bound(slopes) * temperature)
}

/// Rouche-style linearization-quality bound.
///
/// With logit curvature `C` along the direction and minimal normalized
/// softmax weight `w_min`, the perturbation parameter is
/// `eps = C pi^2 / (2 Delta_a^2 w_min)`; when `eps < 1` the true radius is at
/// least `(pi / Delta_a)(1 - eps)`. Returns `(eps, floor)`, `floor = None`
/// when the condition gives no guarantee.
pub fn linearization_epsilon<R: Real>(curvature: R, delta_a: R, w_min: R) -> (R, Option<R>) {
    let pi = R::PI();
    let eps = curvature * pi * pi / (R::of(2.0) * delta_a * delta_a * w_min);
    if eps < R::one() {
        (eps, Some(pi / delta_a * (R::one() - eps)))
    } else {
        (eps, None)
    }
}

/// Minimal normalized softmax weight `min_k e^{z_k - lse(z)}` for use with
/// [`linearization_epsilon`].
pub fn min_softmax_weight<R: Real>(z: &[R]) -> R {
    let lse = log_sum_exp(z);
    z.iter()
        .map(|&zk| (zk - lse).exp())
        .fold(R::infinity(), R::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn slopes(a: &[f64]) -> DirectionalSlopes<f64> {
        DirectionalSlopes::new(a.to_vec(), 0)
    }

    #[test]
    fn spread_basic() {
        assert_eq!(slopes(&[1.0, 4.0, 2.0]).spread(), 3.0);
        assert_eq!(slopes(&[0.7, 0.7, 0.7]).spread(), 0.0);
    }

    #[test]
    fn spread_sign_invariance() {
        let s = slopes(&[1.0, 4.0, 2.0]);
        let n = slopes(&[-1.0, -4.0, -2.0]);
        assert_eq!(s.spread(), n.spread());
    }

    #[test]
    fn binary_radius_reference_values() {
        assert!((binary_radius(0.0, 1.0).unwrap() - PI).abs() < 1e-12);
        assert!((binary_radius(PI, 1.0).unwrap() - PI * 2.0f64.sqrt()).abs() < 1e-12);
        assert!((binary_radius(0.0f64, 10.0).unwrap() - 0.31415926).abs() < 1e-6);
        assert!(binary_radius(1.0, 0.0).is_err());
    }

    #[test]
    fn lower_bound_reference_values() {
        assert!((lower_bound(&slopes(&[0.0, 1.0])) - 3.14159).abs() < 1e-3);
        assert!((lower_bound(&slopes(&[0.0, 30.0])) - 0.1047).abs() < 1e-3);
        assert!(lower_bound(&slopes(&[2.0, 2.0])).is_infinite());
    }

    #[test]
    fn ghost_balanced_margin() {
        let state = LogitState::new(vec![0.0, 0.0], 0).unwrap();
        let s = slopes(&[1.0, 0.0]); // gap a_y - a_c = 1
        let (ghost, modulus) = per_sample_ghost(&state, &s).unwrap();
        assert!((ghost - Complex::new(0.0, PI)).norm() < 1e-14);
        assert!((modulus - PI).abs() < 1e-14);
    }

    #[test]
    fn ghost_matches_binary_zero_finder() {
        // delta = 3, gap = -2.
        let state = LogitState::new(vec![3.0, 0.0], 0).unwrap();
        let s = slopes(&[-1.0, 1.0]);
        let (_, modulus) = per_sample_ghost(&state, &s).unwrap();
        let expected = (9.0 + PI * PI).sqrt() / 2.0;
        assert!((modulus - expected).abs() < 1e-12);
        // Cross-check against the two-term closed form.
        let sum = partition_sum(&state, &s).unwrap();
        let [z0, _] = sum.binary_zeros().unwrap();
        assert!((z0.norm() - modulus).abs() < 1e-12);
        assert!(modulus >= PI / 2.0);
    }

    #[test]
    fn ghost_degenerate_gap() {
        let state = LogitState::new(vec![1.0, 0.0], 0).unwrap();
        assert!(matches!(
            per_sample_ghost(&state, &slopes(&[0.5, 0.5])),
            Err(Error::TopTwoDegenerate)
        ));
    }

    #[test]
    fn exact_radius_binary_closed_form() {
        let cfg = ZeroSearchConfig::default();
        let state = LogitState::new(vec![0.0, 0.0], 0).unwrap();
        let r = exact_radius(&state, &slopes(&[0.0, 2.0]), &cfg).unwrap();
        assert!((r - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn exact_radius_three_class_oracle() {
        let cfg = ZeroSearchConfig::default();
        let state = LogitState::new(vec![0.0, 0.0, 0.0], 0).unwrap();
        let r = exact_radius(&state, &slopes(&[0.0, 1.0, 2.0]), &cfg).unwrap();
        assert!((r - 2.0 * PI / 3.0).abs() < 1e-9);
        assert!(r >= lower_bound(&slopes(&[0.0, 1.0, 2.0])) - 1e-9);
    }

    #[test]
    fn batch_radius_bottleneck_and_monotonicity() {
        let set = vec![
            DirectionalSlopes::new(vec![0.0, 1.0], 0),
            DirectionalSlopes::new(vec![0.0, 2.0], 1),
            DirectionalSlopes::new(vec![0.0, 4.0], 2),
        ];
        let full = batch_radius(&set).unwrap();
        assert!((full.rho_a - PI / 4.0).abs() < 1e-14);
        assert_eq!(full.bottleneck_sample, Some(2));
        let sub = batch_radius(&set[..2]).unwrap();
        assert!(sub.rho_a >= full.rho_a);
        assert!(batch_radius::<f64>(&[]).is_err());
    }

    #[test]
    fn normalized_step_values() {
        assert_eq!(normalized_step(0.0, 2.0), 0.0);
        assert_eq!(normalized_step(2.0, 2.0), 1.0);
        // tau = 0.1, Delta_a = 10 pi => r = 1.
        let rho = PI / (10.0 * PI);
        assert!((normalized_step(0.1, rho) - 1.0).abs() < 1e-12);
        assert_eq!(normalized_step(5.0, f64::INFINITY), 0.0);
    }

    #[test]
    fn temperature_scaling_law() {
        let s = slopes(&[0.0, 1.0]);
        let base = temperature_radius(&s, 1.0).unwrap();
        assert_eq!(base, lower_bound(&s));
        assert!((temperature_radius(&s, 2.0).unwrap() - 2.0 * PI).abs() < 1e-12);
        assert_eq!(temperature_radius(&s, 0.5).unwrap(), 0.5 * base);
        assert!(temperature_radius(&s, 0.0).is_err());
    }

    #[test]
    fn linearization_epsilon_limits() {
        let (eps, floor) = linearization_epsilon(0.0, 2.0, 0.1);
        assert_eq!(eps, 0.0);
        assert!((floor.unwrap() - PI / 2.0).abs() < 1e-14);

        let delta_a = 2.0f64;
        let w_min = 0.1;
        // just past the eps = 1 threshold: no guarantee
        let c = 2.0 * delta_a * delta_a * w_min / (PI * PI) * (1.0 + 1e-9);
        let (eps, floor) = linearization_epsilon(c, delta_a, w_min);
        assert!((eps - 1.0).abs() < 1e-6);
        assert!(floor.is_none());
    }

    #[test]
    fn radius_scale_covariance() {
        // Scaling the direction by lambda scales slopes by lambda and all
        // radii by 1/lambda; r is invariant under (tau, v) -> (tau/l, l v).
        let s = slopes(&[0.3, -1.2, 0.9]);
        let lam = 2.5;
        let scaled = slopes(&[0.3 * lam, -1.2 * lam, 0.9 * lam]);
        assert!((lower_bound(&scaled) - lower_bound(&s) / lam).abs() < 1e-12);
        let tau = 0.7;
        let r1 = normalized_step(tau, lower_bound(&s));
        let r2 = normalized_step(tau / lam, lower_bound(&scaled));
        assert!((r1 - r2).abs() < 1e-12);
    }
}
