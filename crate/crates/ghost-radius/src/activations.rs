//! Activation families, their complex singular sets, and per-neuron
//! activation-limited radii.
//!
//! A hidden neuron with preactivation `h` moving at rate `hdot` along the
//! update direction hits the activation's nearest complex singularity after a
//! step of `min_{s in Sigma} |s - h| / |hdot|`. Piecewise activations put
//! their singular set on the real axis (breakpoints), the logistic family on
//! the lattice `i pi (2k+1)`, the tanh family on `i (pi/2 + pi k)`, and
//! erf-based activations have none at all.

use crate::scalar::Real;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivationKind<R> {
    Relu,
    LeakyRelu { slope: R },
    Tanh,
    Sigmoid,
    Softplus,
    Silu,
    GeluExact,
    GeluTanh,
    Ria { beta: R },
    Identity,
    // Gated kinds: the layer splits its preactivations into a value half and
    // a gate half and outputs value * gate_fn(gate).
    GaussGlu { beta: R },
    Swiglu,
    Reglu,
}

impl<R: Real> ActivationKind<R> {
    pub fn is_gated(&self) -> bool {
        matches!(
            self,
            ActivationKind::GaussGlu { .. } | ActivationKind::Swiglu | ActivationKind::Reglu
        )
    }

    /// Scalar value and first derivative. For gated kinds this is the gate
    /// function itself (the value path is linear).
    pub fn value_and_derivative(&self, x: R) -> (R, R) {
        use ActivationKind::*;
        match *self {
            Relu => {
                if x > R::zero() {
                    (x, R::one())
                } else {
                    (R::zero(), R::zero())
                }
            }
            LeakyRelu { slope } => {
                if x > R::zero() {
                    (x, R::one())
                } else {
                    (slope * x, slope)
                }
            }
            Tanh => {
                let t = x.tanh();
                (t, R::one() - t * t)
            }
            Sigmoid => {
                let s = sigmoid(x);
                (s, s * (R::one() - s))
            }
            Softplus => (softplus(x), sigmoid(x)),
            Silu | Swiglu => {
                let s = sigmoid(x);
                (x * s, s + x * s * (R::one() - s))
            }
            GeluExact => {
                let phi = norm_cdf(x);
                (x * phi, phi + x * norm_pdf(x))
            }
            GeluTanh => gelu_tanh(x),
            Ria { beta } => (ria(x, beta), norm_cdf(beta * x)),
            Identity => (x, R::one()),
            GaussGlu { beta } => (norm_cdf(beta * x), beta * norm_pdf(beta * x)),
            Reglu => {
                if x > R::zero() {
                    (x, R::one())
                } else {
                    (R::zero(), R::zero())
                }
            }
        }
    }

    pub fn value(&self, x: R) -> R {
        self.value_and_derivative(x).0
    }
}

/// Singular / nonanalytic set of an activation's complex continuation.
#[derive(Debug, Clone, PartialEq)]
pub enum SingularSet<R> {
    /// Kinks on the real axis.
    RealBreakpoints(Vec<R>),
    /// `{ +- i (offset + spacing * k) : k >= 0 }`.
    ImaginaryLattice { offset: R, spacing: R },
    Empty,
}

pub fn singular_set<R: Real>(kind: &ActivationKind<R>) -> SingularSet<R> {
    use ActivationKind::*;
    let pi = R::PI();
    match kind {
        Relu | LeakyRelu { .. } | Reglu => SingularSet::RealBreakpoints(vec![R::zero()]),
        Sigmoid | Softplus | Silu | Swiglu => SingularSet::ImaginaryLattice {
            offset: pi,
            spacing: pi + pi,
        },
        Tanh | GeluTanh => SingularSet::ImaginaryLattice {
            offset: pi * R::of(0.5),
            spacing: pi,
        },
        GeluExact | Ria { .. } | GaussGlu { .. } | Identity => SingularSet::Empty,
    }
}

impl<R: Real> SingularSet<R> {
    /// Distance from the real point `h` to the nearest singular point.
    pub fn distance_from(&self, h: R) -> R {
        match self {
            SingularSet::RealBreakpoints(bs) => bs
                .iter()
                .map(|&b| (h - b).abs())
                .fold(R::infinity(), R::min),
            SingularSet::ImaginaryLattice { offset, .. } => {
                // Nearest lattice point to a real h is +- i*offset.
                h.hypot(*offset)
            }
            SingularSet::Empty => R::infinity(),
        }
    }
}

/// Activation-limited directional radius of a single neuron:
/// `min_{s in Sigma} |s - h| / |hdot|`; infinite when the singular set is
/// empty or the neuron does not move.
pub fn neuron_radius<R: Real>(h: R, hdot: R, kind: &ActivationKind<R>) -> R {
    if hdot == R::zero() {
        return R::infinity();
    }
    singular_set(kind).distance_from(h) / hdot.abs()
}

/// Empirical `q`-quantile of `|h| / |hdot|` over preactivation pairs, with
/// linear interpolation between order statistics. Pairs with `hdot = 0` are
/// infinitely far from their kink and are excluded; if all are, the proxy is
/// infinite.
pub fn ffn_kink_quantile<R: Real>(pairs: &[(R, R)], q: R) -> Result<R> {
    if pairs.is_empty() {
        return Err(Error::NoPreactivations);
    }
    if !(q > R::zero() && q < R::one()) {
        return Err(Error::Config("quantile must be in (0,1)".into()));
    }
    let mut ratios: Vec<R> = pairs
        .iter()
        .filter(|(_, hdot)| *hdot != R::zero())
        .map(|&(h, hdot)| h.abs() / hdot.abs())
        .collect();
    if ratios.is_empty() {
        return Ok(R::infinity());
    }
    ratios.sort_by(|a, b| a.partial_cmp(b).expect("finite ratios"));
    let n = ratios.len();
    if n == 1 {
        return Ok(ratios[0]);
    }
    let pos = q * R::of((n - 1) as f64);
    let lo = pos.floor().as_f64() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = pos - pos.floor();
    Ok(ratios[lo] + frac * (ratios[hi] - ratios[lo]))
}

/// Which term attained the network radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusBottleneck {
    Out,
    Ffn,
}

impl std::fmt::Display for RadiusBottleneck {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RadiusBottleneck::Out => write!(f, "out"),
            RadiusBottleneck::Ffn => write!(f, "ffn"),
        }
    }
}

/// `min(rho_out, rho_ffn)` with the attaining term; ties go to `out`.
pub fn network_radius<R: Real>(rho_out: R, rho_ffn: R) -> (R, RadiusBottleneck) {
    if rho_out <= rho_ffn {
        (rho_out, RadiusBottleneck::Out)
    } else {
        (rho_ffn, RadiusBottleneck::Ffn)
    }
}

pub fn sigmoid<R: Real>(x: R) -> R {
    if x >= R::zero() {
        R::one() / (R::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (R::one() + e)
    }
}

pub fn softplus<R: Real>(x: R) -> R {
    // log(1 + e^x) = max(x, 0) + log(1 + e^{-|x|})
    x.max(R::zero()) + (-x.abs()).exp().ln_1p()
}

/// Standard normal pdf.
pub fn norm_pdf<R: Real>(x: R) -> R {
    let inv_sqrt_2pi = R::of(0.398_942_280_401_432_7);
    inv_sqrt_2pi * (-x * x * R::of(0.5)).exp()
}

/// Standard normal cdf via the error function.
pub fn norm_cdf<R: Real>(x: R) -> R {
    R::of(0.5) * (R::one() + (x * R::FRAC_1_SQRT_2()).erf())
}

/// Gaussian-smoothed rectifier `x Phi(beta x) + phi(beta x) / beta`
/// (ReLU convolved with a Gaussian); derivative `Phi(beta x)`.
pub fn ria<R: Real>(x: R, beta: R) -> R {
    x * norm_cdf(beta * x) + norm_pdf(beta * x) / beta
}

fn gelu_tanh<R: Real>(x: R) -> (R, R) {
    let c = R::of(0.797_884_560_802_865_4); // sqrt(2/pi)
    let k = R::of(0.044715);
    let half = R::of(0.5);
    let inner = c * (x + k * x * x * x);
    let t = inner.tanh();
    let dinner = c * (R::one() + R::of(3.0) * k * x * x);
    let v = half * x * (R::one() + t);
    let d = half * (R::one() + t) + half * x * (R::one() - t * t) * dinner;
    (v, d)
}
