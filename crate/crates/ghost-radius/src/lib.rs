//! Taylor-convergence radius of softmax cross-entropy along arbitrary update
//! directions.
//!
//! The cross-entropy loss restricted to a line in parameter space is, under
//! logit linearization, `-a_y t + log F(t)` where `F(t) = sum_k w_k e^{a_k t}`
//! is a positive exponential sum. `F` never vanishes on the real line but has
//! complex zeros ("ghosts"), and the nearest one caps the Taylor convergence
//! radius of the loss. This crate computes that radius three ways: exactly in
//! closed form for two terms, numerically for the general case via grid-seeded
//! Newton iteration with an argument-principle cross-check, and through the
//! conservative lower bound `pi / Delta_a` where `Delta_a` is the spread of
//! the directional logit derivatives.
//!
//! On top of the radius sit a small dense-network engine with reverse-mode
//! gradients and forward-mode JVPs ([`autonet`]), step-size controllers that
//! keep the normalized step `r = tau / rho_a` below one ([`controller`]), and
//! an experiment harness ([`harness`]) driven by the `ghost` CLI.
//!
//! The numeric core is generic over the scalar type via [`scalar::Real`];
//! concrete `f64` aliases live at the crate root. Double precision is the
//! intended working type: the zero-finding cross-checks are too tight for
//! `f32`.

pub mod activations;
pub mod autonet;
pub mod controller;
mod error;
pub mod expsum;
pub mod harness;
pub mod hessian;
pub mod klbound;
pub mod radius;
pub mod scalar;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Default double-precision aliases for the generic core.
pub type ExpSum64 = expsum::ExpSum<f64>;
pub type ZeroSearchConfig64 = expsum::ZeroSearchConfig<f64>;
pub type DirectionalSlopes64 = radius::DirectionalSlopes<f64>;
pub type LogitState64 = radius::LogitState<f64>;
pub type RadiusReport64 = radius::RadiusReport<f64>;
pub type ActivationKind64 = activations::ActivationKind<f64>;
pub type SoftmaxPath64 = klbound::SoftmaxPath<f64>;
pub type MarginState64 = hessian::MarginState<f64>;
