//! Dephasing of a two-level quantum system coupled linearly or quadratically
//! to nonstationary Ornstein-Uhlenbeck noise (OUN) or random telegraph noise
//! (RTN).
//!
//! The crate computes the decoherence function `F(t)`, the decoherence rate
//! `Gamma(t)` and the frequency shift `S(t)` along four independent routes
//! that must agree with each other:
//!
//! * [`analytic`] - closed-form expressions for all four noise/coupling
//!   combinations,
//! * [`sle`] - direct numerical solution of the marginal-average master
//!   equation (a complex Fokker-Planck PDE for OUN, a two-state ODE for RTN),
//! * [`mc`] - trajectory-ensemble averages with standard errors,
//! * [`dynamics`] - alternative closed dynamical equations (second-order
//!   time-convolutionless for OUN, Volterra with exponential kernel for RTN)
//!   plus everything downstream of `F(t)`: coherence evolution, rate
//!   extraction, and master-equation propagation.
//!
//! [`noise`] holds the parameter types, exact probability laws, moments and
//! exact trajectory samplers shared by all routes.
//!
//! The crate is `no_std` (with `alloc`); enable the `std` feature to pull in
//! the standard library in dependencies.

#![no_std]
#![warn(missing_debug_implementations)]
// Validation uses negated comparisons like `!(x > 0.0)` so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod analytic;
pub mod dynamics;
mod error;
pub mod mc;
pub mod noise;
pub mod sle;

pub use error::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Complex scalar used for decoherence functions and marginal averages.
pub type Complex = num_complex::Complex<f64>;
