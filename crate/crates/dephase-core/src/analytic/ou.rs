//! Closed forms for linear and quadratic coupling to the nonstationary OUN.

// Needed for f64 math in no_std builds; with std the inherent methods win.
#[allow(unused_imports)]
use num_traits::Float;

use crate::noise::OuParams;
use crate::Complex;

fn eta(gamma: f64, t: f64) -> f64 {
    1.0 - (-gamma * t).exp()
}

/// Decoherence function for linear coupling,
/// `F = exp{ i (c b chi / gamma) eta - (c sigma / gamma)^2 [gamma t - eta - b^2 eta^2 / 2] }`
/// with `eta = 1 - e^{-gamma t}`.
///
/// The integrated noise is Gaussian with mean `b chi eta / gamma` and
/// variance `(sigma / gamma)^2 [2 (gamma t - eta) - b^2 eta^2]`, the double
/// integral of the covariance
/// `sigma^2 [e^{-gamma (t1 - t2)} - b^2 e^{-gamma (t1 + t2)}]`; the
/// nonstationary initial law narrows the covariance, so `|F|` grows with
/// `|b|` at fixed `t` (the Monte Carlo moment tests pin this down).
pub fn ou_linear_f(t: f64, p: &OuParams, c: f64) -> Complex {
    let g = p.gamma();
    let e = eta(g, t);
    let cs = c * p.sigma() / g;
    let b2 = p.b() * p.b();
    let re = -cs * cs * (g * t - e - 0.5 * b2 * e * e);
    let im = c * p.b() * p.chi() / g * e;
    Complex::new(re, im).exp()
}

/// `Gamma = (c sigma)^2 / gamma (1 - e^{-gamma t})(1 - b^2 e^{-gamma t})`,
/// the half time derivative of the phase variance.  Monotonically
/// increasing, with `d Gamma / d|b| < 0` at fixed `t > 0`.
pub fn ou_linear_gamma(t: f64, p: &OuParams, c: f64) -> f64 {
    let cs = c * p.sigma();
    let d = (-p.gamma() * t).exp();
    cs * cs / p.gamma() * (1.0 - d) * (1.0 - p.b() * p.b() * d)
}

/// `S = -c b chi e^{-gamma t}`.
pub fn ou_linear_shift(t: f64, p: &OuParams, c: f64) -> f64 {
    -c * p.b() * p.chi() * (-p.gamma() * t).exp()
}

/// Derived constants of the quadratic-OUN closed form.
///
/// `epsilon` is the principal square root of `1 - 4 i c sigma^2 / gamma`,
/// equal to `alpha - i sign(c) beta` with the positive reals
/// `alpha = sqrt((w + 1)/2)`, `beta = sqrt((w - 1)/2)`,
/// `w = sqrt(1 + 16 c^2 sigma^4 / gamma^2)`.  The remaining parameters are
/// the real auxiliary constants of the rate/shift expressions, which are
/// functions of `|c|` only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticOuDerived {
    pub epsilon: Complex,
    pub alpha: f64,
    pub beta: f64,
    pub ell_plus: Complex,
    pub ell_minus: Complex,
    pub d_plus: f64,
    pub d_minus: f64,
    pub g_plus: f64,
    pub g_minus: f64,
    pub h_plus: f64,
    pub h_minus: f64,
    pub j_plus: f64,
    pub j_minus: f64,
    pub u: f64,
    pub v: f64,
}

impl QuadraticOuDerived {
    pub fn new(p: &OuParams, c: f64) -> Self {
        let g = p.gamma();
        let s2 = p.sigma() * p.sigma();
        let w = (1.0 + 16.0 * c * c * s2 * s2 / (g * g)).sqrt();
        let alpha = ((w + 1.0) / 2.0).sqrt();
        let beta = ((w - 1.0) / 2.0).sqrt();
        let epsilon = Complex::new(alpha, -c.signum() * beta);
        let b2 = p.b() * p.b();
        let ell_plus = (1.0 - b2) * epsilon + (1.0 + b2);
        let ell_minus = (1.0 - b2) * epsilon - (1.0 + b2);
        // a1 = alpha (1 - b^2); the rate/shift auxiliaries below.
        let a1 = alpha * (1.0 - b2);
        let ap1 = alpha + 1.0;
        let am1 = alpha - 1.0;
        let bb = beta * beta;
        let d_plus = ap1 * ap1 + bb * (a1 + 1.0) * (a1 + 1.0);
        let d_minus = ap1 * ap1 - bb * (a1 + 1.0) * (a1 + 1.0);
        let g_plus = am1 * am1 + bb * (a1 - 1.0) * (a1 - 1.0);
        let g_minus = am1 * am1 - bb * (a1 - 1.0) * (a1 - 1.0);
        let h_plus = ap1 * (a1 - 1.0) + am1 * (a1 + 1.0);
        let h_minus = ap1 * (a1 - 1.0) - am1 * (a1 + 1.0);
        let j_plus = bb * (a1 * a1 - 1.0) + (alpha * alpha - 1.0);
        let j_minus = bb * (a1 * a1 - 1.0) - (alpha * alpha - 1.0);
        let u = ap1 * (a1 + 1.0);
        let v = am1 * (a1 - 1.0);
        let derived = Self {
            epsilon,
            alpha,
            beta,
            ell_plus,
            ell_minus,
            d_plus,
            d_minus,
            g_plus,
            g_minus,
            h_plus,
            h_minus,
            j_plus,
            j_minus,
            u,
            v,
        };
        // F(0) = 1 requires ell_+ (eps + 1) - ell_- (eps - 1) = 4 eps.
        debug_assert!(
            (derived.ell_plus * (epsilon + 1.0) - derived.ell_minus * (epsilon - 1.0)
                - 4.0 * epsilon)
                .norm()
                < 1e-9 * epsilon.norm()
        );
        derived
    }
}

/// Decoherence function for quadratic coupling to the OUN.
///
/// The prefactor is evaluated as `sqrt(A) / sqrt(1 - z(t))` with
/// `A = 4 eps / [ell_+ (eps + 1)]` and
/// `z(t) = [ell_- (eps - 1) / (ell_+ (eps + 1))] e^{-2 eps gamma t}`;
/// `|z| < 1` always, so neither square root crosses its branch cut and the
/// product stays continuous in `t` with `F(0) = 1`.
pub fn ou_quadratic_f(t: f64, p: &OuParams, c: f64) -> Complex {
    if t == 0.0 {
        return Complex::new(1.0, 0.0);
    }
    let d = QuadraticOuDerived::new(p, c);
    let eps = d.epsilon;
    let g = p.gamma();
    let s2 = p.sigma() * p.sigma();
    let lead = d.ell_plus * (eps + 1.0);
    let rho = d.ell_minus * (eps - 1.0) / lead;
    let z = rho * (-2.0 * eps * g * t).exp();
    let prefactor = (4.0 * eps / lead).sqrt() / (Complex::new(1.0, 0.0) - z).sqrt();
    let denom = lead * (Complex::new(1.0, 0.0) - z);
    let bchi = p.b() * p.chi();
    // eps^2 - 1 = -4 i c sigma^2 / gamma exactly.
    let eps2m1 = Complex::new(0.0, -4.0 * c * s2 / g);
    let e2 = (-2.0 * eps * g * t).exp();
    let exponent = -0.5 * g * (eps - 1.0) * t
        - bchi * bchi * eps2m1 * (Complex::new(1.0, 0.0) - e2) / (2.0 * s2 * denom);
    prefactor * exponent.exp()
}

struct QuadRateTerms {
    denom: f64,
    first_num_gamma: f64,
    first_num_shift: f64,
    second: f64,
    second_gamma: f64,
    second_shift: f64,
    alpha: f64,
    beta: f64,
}

/// Shared evaluation of the rate/shift auxiliaries at `|c|`.
fn quad_rate_terms(t: f64, p: &OuParams, c_abs: f64) -> QuadRateTerms {
    let d = QuadraticOuDerived::new(p, c_abs);
    let g = p.gamma();
    let (alpha, beta) = (d.alpha, d.beta);
    let bb = beta * beta;
    let (sin, cos) = (2.0 * beta * g * t).sin_cos();
    let e2 = (-2.0 * alpha * g * t).exp();
    let e4 = e2 * e2;
    let b_t = beta * d.h_plus * sin + d.j_minus * cos;
    let c_t = beta * (d.j_minus - alpha * d.h_plus) * sin
        - (alpha * d.j_minus + bb * d.h_plus) * cos;
    let i_t = (d.d_minus + 4.0 * alpha * bb * d.u) * sin
        + 2.0 * beta * (d.u - alpha * d.d_minus) * cos;
    let j = d.h_minus + 2.0 * alpha * d.j_plus;
    let k_t = (4.0 * alpha * bb * d.v - d.g_minus) * sin
        - 2.0 * beta * (alpha * d.g_minus + d.v) * cos;
    let d_t = (alpha * d.j_minus + bb * d.h_plus) * sin
        + beta * (d.j_minus - alpha * d.h_plus) * cos;
    let l_t = 2.0 * beta * (d.u - alpha * d.d_minus) * sin
        - (d.d_minus + 4.0 * alpha * bb * d.u) * cos;
    let m = 2.0 * alpha * bb * d.h_minus - d.j_plus;
    let n_t = 2.0 * beta * (alpha * d.g_minus + d.v) * sin
        + (4.0 * alpha * bb * d.v - d.g_minus) * cos;
    let denom = d.d_plus - 2.0 * b_t * e2 + d.g_plus * e4;
    let bchi = p.b() * p.chi();
    let s2 = p.sigma() * p.sigma();
    let second = 2.0 * alpha * beta * g * bchi * bchi / s2 * e2;
    QuadRateTerms {
        denom,
        first_num_gamma: g * (c_t * e2 + alpha * d.d_plus),
        first_num_shift: g * (d_t * e2 - beta * d.d_plus),
        second,
        second_gamma: i_t - 2.0 * beta * j * e2 + k_t * e4,
        second_shift: l_t + 2.0 * m * e2 + n_t * e4,
        alpha,
        beta,
    }
}

/// Decoherence rate for quadratic coupling; even in `c`.
pub fn ou_quadratic_gamma(t: f64, p: &OuParams, c: f64) -> f64 {
    let q = quad_rate_terms(t, p, c.abs());
    q.first_num_gamma / q.denom + q.second * q.second_gamma / (q.denom * q.denom)
        - 0.5 * p.gamma() * (q.alpha + 1.0)
}

/// Frequency shift for quadratic coupling; odd in `c`.
pub fn ou_quadratic_shift(t: f64, p: &OuParams, c: f64) -> f64 {
    let q = quad_rate_terms(t, p, c.abs());
    let s = q.first_num_shift / q.denom + q.second * q.second_shift / (q.denom * q.denom)
        + 0.5 * p.gamma() * q.beta;
    c.signum() * s
}
