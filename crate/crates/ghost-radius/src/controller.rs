//! Step-size control from the radius: the clip `s = min(1, rho_a / tau0)`,
//! the target-r controller `eta = r rho_a / ||v||`, and the radius-blind
//! gradient-clipping baseline.

use crate::autonet::{logit_jvp, Batch, NetworkSpec};
use crate::radius::{batch_radius, normalized_step, DirectionalSlopes, RadiusReport};
use crate::scalar::norm;
use crate::{Error, Result};

/// At most this many batch samples feed a radius estimate.
pub const MAX_RHO_SAMPLES: usize = 256;

/// Outcome of one clip decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlDecision {
    /// Applied scale in (0, 1].
    pub scale: f64,
    pub rho_a: f64,
    pub tau_before: f64,
    pub tau_after: f64,
    /// Normalized step after the clip; zero for an infinite radius.
    pub r_after: f64,
}

/// Rescale a tentative update so its norm never exceeds `rho_a`.
///
/// Post-clip `r = min(1, tau0 / rho_a) <= 1`. A zero update or infinite
/// radius passes through with scale 1.
pub fn radius_clip(p: &[f64], rho_a: f64) -> (Vec<f64>, ControlDecision) {
    let tau_before = norm(p);
    let scale = if tau_before > 0.0 && rho_a.is_finite() && rho_a < tau_before {
        rho_a / tau_before
    } else {
        1.0
    };
    let scaled: Vec<f64> = p.iter().map(|x| x * scale).collect();
    let tau_after = scale * tau_before;
    (
        scaled,
        ControlDecision {
            scale,
            rho_a,
            tau_before,
            tau_after,
            r_after: normalized_step(tau_after, rho_a),
        },
    )
}

/// Learning rate hitting the target normalized step exactly:
/// `eta = r_target rho_a / ||v||`, so the descent step `-eta v` has
/// `tau = r_target rho_a`. An infinite radius falls back to `eta_max`.
pub fn target_r_step(
    v: &[f64],
    r_target: f64,
    rho_a: f64,
    eta_max: f64,
) -> Result<(f64, Vec<f64>)> {
    if !(r_target > 0.0) || !(eta_max > 0.0) {
        return Err(Error::Config("r_target and eta_max must be positive".into()));
    }
    let vnorm = norm(v);
    if vnorm == 0.0 {
        return Err(Error::ZeroDirection);
    }
    let eta = if rho_a.is_finite() {
        r_target * rho_a / vnorm
    } else {
        eta_max
    };
    Ok((eta, v.iter().map(|x| -eta * x).collect()))
}

/// Norm clipping `g min(1, c / ||g||)`: the comparison baseline,
/// intentionally blind to the radius.
pub fn grad_clip_baseline(g: &[f64], c: f64) -> Result<Vec<f64>> {
    if !(c > 0.0) {
        return Err(Error::Config("clip threshold must be positive".into()));
    }
    let gnorm = norm(g);
    let s = if gnorm > c { c / gnorm } else { 1.0 };
    Ok(g.iter().map(|x| x * s).collect())
}

/// How directional slopes are obtained for a radius estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhoMode {
    /// Exact per-sample slopes from one forward-mode pass each.
    Jvp,
    /// Central difference `(z(theta + h v) - z(theta - h v)) / 2h` with
    /// `h = 1e-4 max(1, ||theta||_inf)`.
    FiniteDiff,
}

impl std::fmt::Display for RhoMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RhoMode::Jvp => write!(f, "jvp"),
            RhoMode::FiniteDiff => write!(f, "finite_diff"),
        }
    }
}

/// Radius report tagged with the slope-estimation mode.
#[derive(Debug, Clone)]
pub struct RhoEstimate {
    pub report: RadiusReport<f64>,
    pub mode: RhoMode,
}

/// Batch radius along `direction`, over at most [`MAX_RHO_SAMPLES`] samples.
pub fn rho_estimate(
    spec: &NetworkSpec,
    params: &[f64],
    batch: &Batch,
    direction: &[f64],
    mode: RhoMode,
) -> Result<RhoEstimate> {
    let vnorm = norm(direction);
    if vnorm == 0.0 {
        return Err(Error::ZeroDirection);
    }
    let n = batch.len().min(MAX_RHO_SAMPLES);
    let mut slopes = Vec::with_capacity(n);
    match mode {
        RhoMode::Jvp => {
            for (i, x) in batch.inputs.iter().take(n).enumerate() {
                let a = logit_jvp(spec, params, x, direction)?;
                slopes.push(DirectionalSlopes::new(a, i));
            }
        }
        RhoMode::FiniteDiff => {
            let vhat: Vec<f64> = direction.iter().map(|d| d / vnorm).collect();
            let theta_inf = params.iter().fold(0.0f64, |m, p| m.max(p.abs()));
            let h = 1e-4 * theta_inf.max(1.0);
            let plus: Vec<f64> = params.iter().zip(&vhat).map(|(p, v)| p + h * v).collect();
            let minus: Vec<f64> = params.iter().zip(&vhat).map(|(p, v)| p - h * v).collect();
            for (i, x) in batch.inputs.iter().take(n).enumerate() {
                let zp = crate::autonet::forward(spec, &plus, x)?;
                let zm = crate::autonet::forward(spec, &minus, x)?;
                let a = zp
                    .iter()
                    .zip(&zm)
                    .map(|(p, m)| (p - m) / (2.0 * h))
                    .collect();
                slopes.push(DirectionalSlopes::new(a, i));
            }
        }
    }
    Ok(RhoEstimate {
        report: batch_radius(&slopes)?,
        mode,
    })
}
