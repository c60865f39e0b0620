//! Exponential sums `F(t) = sum_k w_k e^{a_k t}` and their complex zeros.
//!
//! With positive weights, `F` is strictly positive on the real line; its
//! zeros live off the real axis and come in conjugate pairs. The nearest zero
//! caps the Taylor convergence radius of `log F`, so locating it is the core
//! numeric task of this crate. Two terms admit a closed form; the general
//! case is handled by grid-seeded Newton iteration on a spread-normalized
//! strip, cross-checked by an argument-principle winding count.

use crate::scalar::Real;
use crate::{Error, Result};
use num_complex::Complex;

/// A point of the complex step plane.
pub type ComplexPoint<R> = Complex<R>;

/// Positive exponential sum `F(t) = sum_k w_k e^{a_k t}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpSum<R: Real> {
    weights: Vec<R>,
    slopes: Vec<R>,
}

/// Search parameters for [`ExpSum::nearest_zero`].
///
/// The strip height is measured in multiples of the guaranteed zero-free
/// distance `pi / Delta_a`; the seed grid is laid out in spread-normalized
/// coordinates (`u = Delta_a * t`) at `grid_density` points per unit length.
#[derive(Debug, Clone, Copy)]
pub struct ZeroSearchConfig<R: Real> {
    pub max_imag_multiplier: R,
    pub grid_density: usize,
    pub newton_tol: R,
    pub max_newton_iters: usize,
}

impl<R: Real> Default for ZeroSearchConfig<R> {
    fn default() -> Self {
        Self {
            max_imag_multiplier: R::of(4.0),
            grid_density: 6,
            newton_tol: R::of(1e-10),
            max_newton_iters: 60,
        }
    }
}

impl<R: Real> ZeroSearchConfig<R> {
    pub fn validate(&self) -> Result<()> {
        if self.newton_tol <= R::zero() || self.grid_density < 4 {
            return Err(Error::Config(
                "newton_tol must be > 0 and grid_density >= 4".into(),
            ));
        }
        Ok(())
    }
}

impl<R: Real> ExpSum<R> {
    pub fn new(weights: Vec<R>, slopes: Vec<R>) -> Result<Self> {
        if weights.len() != slopes.len() || weights.len() < 2 {
            return Err(Error::BadExpSum);
        }
        if weights.iter().any(|w| !(*w > R::zero()) || !w.is_finite()) {
            return Err(Error::NonpositiveWeight);
        }
        if slopes.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonfiniteSlope);
        }
        Ok(Self { weights, slopes })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weights(&self) -> &[R] {
        &self.weights
    }

    pub fn slopes(&self) -> &[R] {
        &self.slopes
    }

    /// Slope spread `max_k a_k - min_k a_k`.
    pub fn spread(&self) -> R {
        let max = self.slopes.iter().cloned().fold(R::neg_infinity(), R::max);
        let min = self.slopes.iter().cloned().fold(R::infinity(), R::min);
        max - min
    }

    /// `F(0) = sum_k w_k`.
    pub fn at_origin(&self) -> R {
        self.weights.iter().cloned().fold(R::zero(), |a, b| a + b)
    }

    /// Evaluate `F(t)` in complex arithmetic.
    ///
    /// Fails with [`Error::MagnitudeOverflow`] when a term's magnitude
    /// exceeds the scalar's exponent range.
    pub fn eval(&self, t: ComplexPoint<R>) -> Result<ComplexPoint<R>> {
        let limit = R::max_value().ln() - R::of(8.0);
        let mut acc = Complex::new(R::zero(), R::zero());
        for (&w, &a) in self.weights.iter().zip(&self.slopes) {
            let log_mag = w.ln() + a * t.re;
            if log_mag > limit {
                return Err(Error::MagnitudeOverflow);
            }
            acc = acc + Complex::new(a * t.re + w.ln(), a * t.im).exp();
        }
        Ok(acc)
    }

    /// Stabilized evaluation: returns `(m, s)` with `F(t) = e^m * s` and the
    /// largest term of `s` of unit magnitude. Immune to exponent overflow.
    fn eval_scaled(&self, t: ComplexPoint<R>) -> (R, ComplexPoint<R>) {
        let m = self
            .weights
            .iter()
            .zip(&self.slopes)
            .map(|(&w, &a)| w.ln() + a * t.re)
            .fold(R::neg_infinity(), R::max);
        let mut s = Complex::new(R::zero(), R::zero());
        for (&w, &a) in self.weights.iter().zip(&self.slopes) {
            s = s + Complex::new(w.ln() + a * t.re - m, a * t.im).exp();
        }
        (m, s)
    }

    /// Like [`eval_scaled`], but also returns the scaled derivative so that
    /// the Newton step `F/F'` can be formed without the `e^m` factor.
    fn eval_scaled_with_derivative(
        &self,
        t: ComplexPoint<R>,
    ) -> (R, ComplexPoint<R>, ComplexPoint<R>) {
        let m = self
            .weights
            .iter()
            .zip(&self.slopes)
            .map(|(&w, &a)| w.ln() + a * t.re)
            .fold(R::neg_infinity(), R::max);
        let mut s = Complex::new(R::zero(), R::zero());
        let mut ds = Complex::new(R::zero(), R::zero());
        for (&w, &a) in self.weights.iter().zip(&self.slopes) {
            let term = Complex::new(w.ln() + a * t.re - m, a * t.im).exp();
            s = s + term;
            ds = ds + term.scale(a);
        }
        (m, s, ds)
    }

    /// `log |F(t)|`, overflow-free.
    pub fn log_abs(&self, t: ComplexPoint<R>) -> R {
        let (m, s) = self.eval_scaled(t);
        m + s.norm().ln()
    }

    /// Closed-form zeros of a two-term sum: `t = (delta + i pi (2k+1)) / D`
    /// for `k = 0, -1`, with `delta = log(w_1/w_2)` and `D` the second slope
    /// minus the first. Both have modulus `sqrt(delta^2 + pi^2) / |D|`.
    pub fn binary_zeros(&self) -> Result<[ComplexPoint<R>; 2]> {
        if self.len() != 2 {
            return Err(Error::BadExpSum);
        }
        let gap = self.slopes[1] - self.slopes[0];
        if gap == R::zero() {
            return Err(Error::DegenerateSpread);
        }
        let delta = (self.weights[0] / self.weights[1]).ln();
        let pi = R::PI();
        let z0 = Complex::new(delta / gap, pi / gap);
        let z1 = Complex::new(delta / gap, -pi / gap);
        Ok([z0, z1])
    }

    /// Zero of `F` with smallest modulus.
    ///
    /// Two-term sums use the closed form; otherwise Newton iteration is
    /// seeded on a grid over the half-strip
    /// `Im(t) in [~pi/Delta_a, max_imag_multiplier * pi/Delta_a]`
    /// (zeros come in conjugate pairs, so the upper half suffices). The
    /// winner is cross-checked by a winding count over the slightly shrunken
    /// disk, which must contain no zeros.
    pub fn nearest_zero(&self, cfg: &ZeroSearchConfig<R>) -> Result<(ComplexPoint<R>, R)> {
        cfg.validate()?;
        let spread = self.spread();
        if spread == R::zero() {
            return Err(Error::DegenerateSpread);
        }

        let best = if self.len() == 2 {
            let [z0, z1] = self.binary_zeros()?;
            if z0.im >= R::zero() {
                z0
            } else {
                z1
            }
        } else {
            self.grid_newton_search(cfg, spread)?
        };
        let modulus = best.norm();

        // Minimality cross-check: no zeros strictly inside the shrunken disk.
        // Other zeros of the sum can sit arbitrarily close to any particular
        // contour, so shrink further and retry when the contour is unusable.
        let mut last_err = Error::ContourNearZero;
        for &shrink in &[1e-6, 1e-4, 1e-3, 1e-2] {
            let contour = modulus * (R::one() - R::of(shrink));
            match self.count_zeros_in_disk(contour, 2048) {
                Ok(0) => return Ok((best, modulus)),
                Ok(inside) => return Err(Error::MinimalityFailed(inside)),
                Err(e) => last_err = e,
            }
        }
        Err(last_err)
    }

    fn grid_newton_search(
        &self,
        cfg: &ZeroSearchConfig<R>,
        spread: R,
    ) -> Result<ComplexPoint<R>> {
        let pi = R::PI();
        let unit = pi / spread; // guaranteed zero-free distance
        let im_lo = unit * R::of(0.9);
        let im_hi = unit * cfg.max_imag_multiplier;
        let re_max = im_hi;
        // Seed spacing: grid_density points per unit length in the
        // spread-normalized plane u = Delta_a * t.
        let h = (R::one() / spread) / R::of(cfg.grid_density as f64);
        let log_f0 = self.at_origin().ln();
        let log_tol = cfg.newton_tol.ln();
        let merge_tol = unit * R::of(1e-7);

        let mut zeros: Vec<ComplexPoint<R>> = Vec::new();
        let n_im = ((im_hi - im_lo) / h).as_f64().ceil() as usize + 1;
        let n_re = ((re_max + re_max) / h).as_f64().ceil() as usize + 1;
        for i in 0..n_im {
            let im = im_lo + h * R::of(i as f64);
            for j in 0..n_re {
                let re = -re_max + h * R::of(j as f64);
                if let Some(z) = self.newton_polish(
                    Complex::new(re, im),
                    log_f0,
                    log_tol,
                    cfg.max_newton_iters,
                    im_hi,
                ) {
                    let z = if z.im < R::zero() { z.conj() } else { z };
                    if !zeros.iter().any(|q| (q - z).norm() < merge_tol) {
                        zeros.push(z);
                    }
                }
            }
        }
        if zeros.is_empty() {
            return Err(Error::SearchExhausted {
                lo: im_lo.as_f64(),
                hi: im_hi.as_f64(),
            });
        }
        // Deterministic min-modulus reduction, ties broken by (re, im).
        zeros.sort_by(|a, b| {
            (a.norm(), a.re, a.im)
                .partial_cmp(&(b.norm(), b.re, b.im))
                .expect("finite zeros")
        });
        Ok(zeros[0])
    }

    /// Newton iteration from `seed`; `None` on divergence or failure to meet
    /// the residual criterion `|F(t)| < tol * F(0)`.
    fn newton_polish(
        &self,
        seed: ComplexPoint<R>,
        log_f0: R,
        log_tol: R,
        max_iters: usize,
        escape: R,
    ) -> Option<ComplexPoint<R>> {
        let mut t = seed;
        let escape = escape * R::of(8.0);
        for _ in 0..max_iters {
            let (m, s, ds) = self.eval_scaled_with_derivative(t);
            let log_res = m + s.norm().ln() - log_f0;
            if log_res < log_tol {
                return Some(t);
            }
            if ds.norm() == R::zero() {
                return None;
            }
            let step = s / ds;
            t = t - step;
            if !t.re.is_finite() || !t.im.is_finite() || t.norm() > escape {
                return None;
            }
        }
        let (m, s, _) = self.eval_scaled_with_derivative(t);
        if m + s.norm().ln() - log_f0 < log_tol {
            Some(t)
        } else {
            None
        }
    }

    /// Number of zeros (with multiplicity) strictly inside `|t| = radius`,
    /// by phase accumulation of `F` around the circle.
    ///
    /// Starts from `samples` equispaced points and bisects any arc whose
    /// phase jump exceeds `pi/2`, so the winding number is robust to zeros
    /// moderately near the contour. Fails if `F` nearly vanishes on the
    /// contour itself.
    pub fn count_zeros_in_disk(&self, radius: R, samples: usize) -> Result<i64> {
        assert!(samples >= 8, "need at least 8 contour samples");
        if !(radius > R::zero()) {
            return Ok(0);
        }
        let two_pi = R::PI() + R::PI();
        let point = |theta: R| {
            Complex::new(radius * theta.cos(), radius * theta.sin())
        };
        // Cancellation floor: eval_scaled writes F = e^m S with the largest
        // term of S at magnitude 1, so |S| near machine noise means the
        // contour passes through numerically indistinguishable-from-zero
        // territory. The test is pointwise, hence invariant to the huge
        // dynamic range of |F| itself around the circle.
        let floor = R::of(1e3) * R::epsilon() * R::of(self.len() as f64);
        let mut args = Vec::with_capacity(samples + 1);
        let mut thetas = Vec::with_capacity(samples + 1);
        for j in 0..=samples {
            let theta = two_pi * R::of(j as f64) / R::of(samples as f64);
            let (_, s) = self.eval_scaled(point(theta));
            if s.norm() <= floor {
                return Err(Error::ContourNearZero);
            }
            args.push(s.arg());
            thetas.push(theta);
        }

        let mut total = R::zero();
        for j in 0..samples {
            total = total
                + self.arc_phase(
                    thetas[j],
                    args[j],
                    thetas[j + 1],
                    args[j + 1],
                    &point,
                    floor,
                    40,
                )?;
        }
        let winding = (total / two_pi).as_f64().round() as i64;
        Ok(winding)
    }

    /// Phase change of `F` along the arc, bisecting until each piece turns
    /// by less than `pi/2`.
    #[allow(clippy::too_many_arguments)]
    fn arc_phase(
        &self,
        t0: R,
        a0: R,
        t1: R,
        a1: R,
        point: &impl Fn(R) -> ComplexPoint<R>,
        floor: R,
        depth: usize,
    ) -> Result<R> {
        let d = wrap_angle(a1 - a0);
        if d.abs() <= R::FRAC_PI_2() || depth == 0 {
            return Ok(d);
        }
        let tm = (t0 + t1) * R::of(0.5);
        let (_, s) = self.eval_scaled(point(tm));
        if s.norm() <= floor {
            return Err(Error::ContourNearZero);
        }
        let am = s.arg();
        Ok(self.arc_phase(t0, a0, tm, am, point, floor, depth - 1)?
            + self.arc_phase(tm, am, t1, a1, point, floor, depth - 1)?)
    }
}

/// Wrap an angle difference into `(-pi, pi]`.
fn wrap_angle<R: Real>(d: R) -> R {
    let two_pi = R::PI() + R::PI();
    let mut d = d;
    while d > R::PI() {
        d = d - two_pi;
    }
    while d <= -R::PI() {
        d = d + two_pi;
    }
    d
}
