//! Closed-form decoherence function, decoherence rate and frequency shift
//! for all four noise/coupling cases, plus steady values and regime
//! classification.
//!
//! Sign conventions: the rate/shift expressions for the quadratic OUN case
//! are written for `c > 0`; `Gamma` is even in `c` and `S` is odd, so for
//! `c < 0` they are evaluated at `|c|` with the sign of `S` flipped.  The
//! branch of `epsilon = sqrt(1 - 4 i c sigma^2 / gamma)` is pinned to
//! `epsilon = alpha - i sign(c) beta` (principal branch, `Re epsilon > 0`).
//! Both conventions are validated against finite differences of `F`.

mod ou;
mod rtn;

pub use ou::{
    ou_linear_f, ou_linear_gamma, ou_linear_shift, ou_quadratic_f, ou_quadratic_gamma,
    ou_quadratic_shift, QuadraticOuDerived,
};
pub use rtn::{
    rtn_divergence_time, rtn_linear_f, rtn_linear_gamma, rtn_linear_marginals, rtn_linear_shift,
    rtn_quadratic_f, rtn_quadratic_marginals, rtn_quadratic_shift, rtn_sign_change_time,
    RtnDerived, RtnRegime,
};

// Needed for f64 math in no_std builds; with std the inherent methods win.
#[allow(unused_imports)]
use num_traits::Float;

use crate::noise::{Coupling, NoiseModel};
use crate::Complex;

/// A rate value that may sit on (or numerically too close to) a divergence
/// of the underlying expression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlaggedRate {
    pub value: f64,
    pub diverged: bool,
}

impl FlaggedRate {
    pub fn finite(value: f64) -> Self {
        Self { value, diverged: false }
    }
}

/// Closed-form `F`, `Gamma` and `S` at one time point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormResult {
    pub f: Complex,
    pub gamma: f64,
    pub shift: f64,
    pub diverged: bool,
}

/// Evaluates the closed forms for any noise/coupling case at time `t`.
pub fn evaluate(model: &NoiseModel, coupling: &Coupling, t: f64) -> ClosedFormResult {
    let c = coupling.c();
    match (model, coupling.k()) {
        (NoiseModel::Ou(p), 1) => ClosedFormResult {
            f: ou_linear_f(t, p, c),
            gamma: ou_linear_gamma(t, p, c),
            shift: ou_linear_shift(t, p, c),
            diverged: false,
        },
        (NoiseModel::Ou(p), _) => ClosedFormResult {
            f: ou_quadratic_f(t, p, c),
            gamma: ou_quadratic_gamma(t, p, c),
            shift: ou_quadratic_shift(t, p, c),
            diverged: false,
        },
        (NoiseModel::Rtn(p), 1) => {
            let g = rtn_linear_gamma(t, p, c);
            ClosedFormResult {
                f: rtn_linear_f(t, p, c),
                gamma: g.value,
                shift: rtn_linear_shift(t, p, c),
                diverged: g.diverged,
            }
        }
        (NoiseModel::Rtn(p), _) => ClosedFormResult {
            f: rtn_quadratic_f(t, p, c),
            gamma: 0.0,
            shift: rtn_quadratic_shift(t, p, c),
            diverged: false,
        },
    }
}

/// Long-time limits of the decoherence rate and frequency shift.
///
/// `None` entries mean no steady value exists (the oscillatory
/// strong-coupling RTN-linear regime).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyValues {
    pub gamma_steady: Option<f64>,
    pub shift_steady: Option<f64>,
}

pub fn steady_values(model: &NoiseModel, coupling: &Coupling) -> SteadyValues {
    let c = coupling.c();
    match (model, coupling.k()) {
        (NoiseModel::Ou(p), 1) => {
            let cs = c * p.sigma();
            SteadyValues {
                gamma_steady: Some(cs * cs / p.gamma()),
                shift_steady: Some(0.0),
            }
        }
        (NoiseModel::Ou(p), _) => {
            let d = QuadraticOuDerived::new(p, c);
            SteadyValues {
                gamma_steady: Some(p.gamma() * (d.alpha - 1.0) / 2.0),
                shift_steady: Some(-c.signum() * p.gamma() * d.beta / 2.0),
            }
        }
        (NoiseModel::Rtn(p), 1) => {
            let d = RtnDerived::new(p, c);
            match d.regime() {
                RtnRegime::StrongCoupling => SteadyValues {
                    gamma_steady: None,
                    shift_steady: None,
                },
                _ => {
                    let cn = c * p.nu();
                    SteadyValues {
                        gamma_steady: Some(cn * cn / (p.lambda() + d.kappa_sq().sqrt())),
                        shift_steady: Some(0.0),
                    }
                }
            }
        }
        (NoiseModel::Rtn(p), _) => SteadyValues {
            gamma_steady: Some(0.0),
            shift_steady: Some(-c * p.nu() * p.nu()),
        },
    }
}
