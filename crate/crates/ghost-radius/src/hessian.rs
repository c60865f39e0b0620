//! Curvature-based trust steps versus the ghost radius in the two-class
//! reduction.
//!
//! Along a direction with logit gap `delta` and slope spread `Delta`, the
//! restricted loss has curvature `sigma(delta)(1 - sigma(delta)) Delta^2` at
//! the origin. The Newton-style trust step `tau_H = 2 / curvature` grows like
//! `e^delta` while the ghost radius grows only linearly in `delta`, so the
//! two scales cross near `delta = ln(pi Delta / 2)`.

use crate::radius::binary_radius;
use crate::scalar::Real;
use crate::{Error, Result};

/// Two-class state: logit margin `delta = z_y - z_c` and slope spread
/// `delta_a = |a_y - a_c|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginState<R> {
    pub delta: R,
    pub delta_a: R,
}

/// Comparison of the curvature step against the ghost radius at one margin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhostVsHessian<R> {
    pub curvature: R,
    pub tau_h: R,
    pub rho: R,
    /// `tau_h / rho`; infinite when the curvature underflows to zero.
    pub ratio: R,
}

/// `sigma(delta) (1 - sigma(delta))`, evaluated as
/// `e^{-|delta|} / (1 + e^{-|delta|})^2` so large margins underflow
/// gracefully instead of cancelling.
pub fn logistic_curvature<R: Real>(delta: R) -> R {
    let e = (-delta.abs()).exp();
    let denom = R::one() + e;
    e / (denom * denom)
}

/// Second derivative of the restricted loss at the origin:
/// `sigma(delta)(1 - sigma(delta)) delta_a^2`.
pub fn directional_curvature<R: Real>(state: MarginState<R>) -> R {
    logistic_curvature(state.delta) * state.delta_a * state.delta_a
}

/// Quadratic-model trust step `tau_H = 2 / kappa`; infinite when the
/// curvature has underflowed to zero.
pub fn hessian_step<R: Real>(curvature: R) -> Result<R> {
    if curvature < R::zero() || !curvature.is_finite() {
        return Err(Error::Config("curvature must be finite and >= 0".into()));
    }
    if curvature == R::zero() {
        return Ok(R::infinity());
    }
    Ok(R::of(2.0) / curvature)
}

/// Evaluate both scales and their ratio at one margin state.
pub fn ghost_vs_hessian<R: Real>(state: MarginState<R>) -> Result<GhostVsHessian<R>> {
    if !(state.delta_a > R::zero()) || !state.delta.is_finite() {
        return Err(Error::DegenerateSpread);
    }
    let curvature = directional_curvature(state);
    let tau_h = hessian_step(curvature)?;
    let rho = binary_radius(state.delta, state.delta_a)?;
    let ratio = if tau_h.is_infinite() {
        R::infinity()
    } else {
        tau_h / rho
    };
    Ok(GhostVsHessian {
        curvature,
        tau_h,
        rho,
        ratio,
    })
}

/// Margin where the large-margin trust step `2 e^delta / Delta^2` crosses
/// the radius scale `pi / Delta`: the asymptotic solution is
/// `ln(pi Delta / 2)`, refined by bisection of the same monotone equation.
pub fn crossover_margin<R: Real>(delta_a: R) -> Result<R> {
    if !(delta_a > R::zero()) || !delta_a.is_finite() {
        return Err(Error::DegenerateSpread);
    }
    let asymptotic = (R::PI() * delta_a / R::of(2.0)).ln();
    // f(delta) = delta - ln(pi Delta / 2) is monotone with a single root;
    // bisect the bracketed form to stay agnostic of the log identity.
    let f = |d: R| R::of(2.0) * d.exp() / (delta_a * delta_a) - R::PI() / delta_a;
    let mut lo = R::of(-5.0);
    let mut hi = R::of(50.0);
    if f(lo) > R::zero() || f(hi) < R::zero() {
        return Ok(asymptotic);
    }
    for _ in 0..200 {
        let mid = (lo + hi) / R::of(2.0);
        if f(mid) <= R::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / R::of(2.0))
}
