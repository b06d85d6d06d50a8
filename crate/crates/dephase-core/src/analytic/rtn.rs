//! Closed forms for linear and quadratic coupling to the nonstationary RTN.
//!
//! All expressions are written in terms of `cosh(kappa t)` and
//! `sinh(kappa t)/kappa`, which are entire functions of
//! `kappa^2 = lambda^2 - (c nu)^2`, so the weak-coupling (kappa real),
//! strong-coupling (kappa imaginary) and critical (kappa = 0) regimes share
//! one continuous code path.

// Needed for f64 math in no_std builds; with std the inherent methods win.
#[allow(unused_imports)]
use num_traits::Float;

use crate::analytic::FlaggedRate;
use crate::noise::RtnParams;
use crate::{Complex, Error, Result};

/// Relative cancellation threshold below which the rate denominator is
/// treated as a divergence.
const DIVERGENCE_EPS: f64 = 1e-12;

/// Coupling regime of the RTN-linear case.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RtnRegime {
    /// `|c| < lambda / nu`: kappa real, overdamped decay.
    WeakCoupling,
    /// `|c| > lambda / nu`: kappa imaginary, coherence revivals.
    StrongCoupling,
    /// `|c| = lambda / nu`: kappa = 0.
    Critical,
}

/// Derived constants of the RTN-linear closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RtnDerived {
    kappa_sq: f64,
    regime: RtnRegime,
}

impl RtnDerived {
    pub fn new(p: &RtnParams, c: f64) -> Self {
        let cn = c * p.nu();
        let kappa_sq = p.lambda() * p.lambda() - cn * cn;
        let regime = if kappa_sq > 0.0 {
            RtnRegime::WeakCoupling
        } else if kappa_sq < 0.0 {
            RtnRegime::StrongCoupling
        } else {
            RtnRegime::Critical
        };
        Self { kappa_sq, regime }
    }

    pub fn regime(&self) -> RtnRegime {
        self.regime
    }

    /// `kappa^2 = lambda^2 - (c nu)^2` (real, any sign).
    pub fn kappa_sq(&self) -> f64 {
        self.kappa_sq
    }

    /// `kappa = sqrt(lambda^2 - (c nu)^2)`, complex in general.
    pub fn kappa(&self) -> Complex {
        if self.kappa_sq >= 0.0 {
            Complex::new(self.kappa_sq.sqrt(), 0.0)
        } else {
            Complex::new(0.0, (-self.kappa_sq).sqrt())
        }
    }

    /// `kappa' = -i kappa`, the real oscillation rate of the strong-coupling
    /// regime; errors outside it.
    pub fn kappa_prime(&self) -> Result<f64> {
        if self.regime != RtnRegime::StrongCoupling {
            return Err(Error::Domain(
                "kappa' is defined only in the strong-coupling regime",
            ));
        }
        Ok((-self.kappa_sq).sqrt())
    }
}

/// `(cosh(kappa t), sinh(kappa t)/kappa)` evaluated as entire functions of
/// `kappa^2`, continuous across kappa = 0.
fn cosh_sinhc(kappa_sq: f64, t: f64) -> (f64, f64) {
    let z = kappa_sq * t * t;
    if z.abs() < 1e-6 {
        // Truncated series in z; remainder below 1e-28 at the threshold.
        let c = 1.0 + z / 2.0 * (1.0 + z / 12.0 * (1.0 + z / 30.0));
        let s = t * (1.0 + z / 6.0 * (1.0 + z / 20.0 * (1.0 + z / 42.0)));
        (c, s)
    } else if kappa_sq > 0.0 {
        let k = kappa_sq.sqrt();
        ((k * t).cosh(), (k * t).sinh() / k)
    } else {
        let k = (-kappa_sq).sqrt();
        ((k * t).cos(), (k * t).sin() / k)
    }
}

/// Decoherence function for linear coupling,
/// `F = e^{-lambda t} [cosh(kappa t) + (lambda/kappa) sinh(kappa t)
///      + i (a c nu / kappa) sinh(kappa t)]`.
pub fn rtn_linear_f(t: f64, p: &RtnParams, c: f64) -> Complex {
    let d = RtnDerived::new(p, c);
    let (ch, shc) = cosh_sinhc(d.kappa_sq(), t);
    let decay = (-p.lambda() * t).exp();
    Complex::new(
        decay * (ch + p.lambda() * shc),
        decay * p.a() * c * p.nu() * shc,
    )
}

/// Marginal averages `F(+nu, t)` and `F(-nu, t)` of the linear case.
pub fn rtn_linear_marginals(t: f64, p: &RtnParams, c: f64) -> (Complex, Complex) {
    let d = RtnDerived::new(p, c);
    let (ch, shc) = cosh_sinhc(d.kappa_sq(), t);
    let decay = (-p.lambda() * t).exp();
    let (lam, a, cn) = (p.lambda(), p.a(), c * p.nu());
    let plus = 0.5
        * decay
        * Complex::new(
            (1.0 + a) * ch + (1.0 - a) * lam * shc,
            (1.0 + a) * cn * shc,
        );
    let minus = 0.5
        * decay
        * Complex::new(
            (1.0 - a) * ch + (1.0 + a) * lam * shc,
            -(1.0 - a) * cn * shc,
        );
    (plus, minus)
}

/// Decoherence rate of the linear case.  In the stationary strong-coupling
/// regime the expression diverges at isolated times; values where the
/// denominator is cancelled below `1e-12` of its term scale come back
/// flagged (and infinite) instead of silently huge.
pub fn rtn_linear_gamma(t: f64, p: &RtnParams, c: f64) -> FlaggedRate {
    let d = RtnDerived::new(p, c);
    let (ch, shc) = cosh_sinhc(d.kappa_sq(), t);
    let (lam, a, cn) = (p.lambda(), p.a(), c * p.nu());
    let a2 = a * a;
    let num = cn * cn * shc * ((1.0 - a2) * ch + lam * (1.0 + a2) * shc);
    let core = ch + lam * shc;
    let denom = core * core + (a * cn * shc) * (a * cn * shc);
    let scale = (ch.abs() + lam * shc.abs()).powi(2) + (a * cn * shc) * (a * cn * shc);
    if denom <= DIVERGENCE_EPS * scale {
        FlaggedRate {
            value: if num >= 0.0 { f64::INFINITY } else { f64::NEG_INFINITY },
            diverged: true,
        }
    } else {
        FlaggedRate::finite(num / denom)
    }
}

/// Frequency shift of the linear case, `S = -a c nu kappa^2 / [...]`;
/// identically zero for `a = 0`.
pub fn rtn_linear_shift(t: f64, p: &RtnParams, c: f64) -> f64 {
    if p.a() == 0.0 {
        return 0.0;
    }
    let d = RtnDerived::new(p, c);
    let (ch, shc) = cosh_sinhc(d.kappa_sq(), t);
    let (lam, a, cn) = (p.lambda(), p.a(), c * p.nu());
    let core = ch + lam * shc;
    let denom = core * core + (a * cn * shc) * (a * cn * shc);
    -a * cn / denom
}

/// Divergence times `t_n^d = (n pi - arctan(kappa'/lambda)) / kappa'` of the
/// stationary strong-coupling rate, `n >= 1`.
pub fn rtn_divergence_time(n: u32, p: &RtnParams, c: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("divergence time index must be >= 1"));
    }
    let kp = RtnDerived::new(p, c).kappa_prime()?;
    Ok((n as f64 * core::f64::consts::PI - (kp / p.lambda()).atan()) / kp)
}

/// Sign-change times
/// `t'_n = (n pi - arctan[kappa'(1 - a^2) / (lambda (1 + a^2))]) / kappa'`
/// of the nonstationary strong-coupling rate, `n >= 1`.  For `|a| = 1` this
/// reduces to `n pi / kappa'`, and for `a = 0` to `t_n^d`.
pub fn rtn_sign_change_time(n: u32, p: &RtnParams, c: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("sign-change time index must be >= 1"));
    }
    let kp = RtnDerived::new(p, c).kappa_prime()?;
    let a2 = p.a() * p.a();
    let arg = kp * (1.0 - a2) / (p.lambda() * (1.0 + a2));
    Ok((n as f64 * core::f64::consts::PI - arg.atan()) / kp)
}

/// Quadratic coupling: the phase is deterministic, `F = e^{i c nu^2 t}`.
pub fn rtn_quadratic_f(t: f64, p: &RtnParams, c: f64) -> Complex {
    Complex::new(0.0, c * p.nu() * p.nu() * t).exp()
}

/// Quadratic coupling: `S = -c nu^2`, independent of `a` and `t`.
pub fn rtn_quadratic_shift(_t: f64, p: &RtnParams, c: f64) -> f64 {
    -c * p.nu() * p.nu()
}

/// Quadratic-coupling marginals `F(+-nu, t) = (1 +- a e^{-2 lambda t}) e^{i c nu^2 t} / 2`.
pub fn rtn_quadratic_marginals(t: f64, p: &RtnParams, c: f64) -> (Complex, Complex) {
    let phase = rtn_quadratic_f(t, p, c);
    let relax = p.a() * (-2.0 * p.lambda() * t).exp();
    (0.5 * (1.0 + relax) * phase, 0.5 * (1.0 - relax) * phase)
}
