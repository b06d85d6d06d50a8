//! Everything downstream of `F(t)`: coherence evolution of the two-level
//! system, rate extraction from any trace, master-equation propagation, and
//! the two alternative closed dynamical equations (second-order
//! time-convolutionless for OU-linear, time-convolution Volterra for
//! RTN-linear).

// Needed for f64 math in no_std builds; with std the inherent methods win.
#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;

use crate::noise::{ou_mean, Coupling, OuParams, RtnParams};
use crate::{Complex, Error, Result};

/// `|F|` threshold below which extracted rates are flagged as divergent:
/// the defining ratio `(dF/dt)/F` is undefined at the isolated zeros of `F`.
pub const EPS_DIV: f64 = 1e-9;

/// Relative tolerance for the uniform-grid precondition.
const GRID_TOL: f64 = 1e-9;

/// State of the dephasing two-level system.
///
/// Populations are constant under pure dephasing; only the coherence
/// `rho01` evolves.  `omega0` is the intrinsic frequency difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelState {
    rho00: f64,
    rho11: f64,
    rho01: Complex,
    omega0: f64,
}

impl TwoLevelState {
    /// `rho11` is fixed by trace one.  Positivity `|rho01|^2 <= rho00 rho11`
    /// is enforced up to 1e-12.
    pub fn new(rho00: f64, rho01: Complex, omega0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho00) {
            return Err(Error::Parameter("population rho00 must lie in [0, 1]"));
        }
        let rho11 = 1.0 - rho00;
        if rho01.norm_sqr() > rho00 * rho11 + 1e-12 {
            return Err(Error::Parameter(
                "coherence violates positivity |rho01|^2 <= rho00 rho11",
            ));
        }
        if !omega0.is_finite() {
            return Err(Error::Parameter("omega0 must be finite"));
        }
        Ok(Self {
            rho00,
            rho11,
            rho01,
            omega0,
        })
    }

    /// Equal-weight superposition, the maximal-coherence initial state.
    pub fn superposition(omega0: f64) -> Self {
        Self {
            rho00: 0.5,
            rho11: 0.5,
            rho01: Complex::new(0.5, 0.0),
            omega0,
        }
    }

    pub fn rho00(&self) -> f64 {
        self.rho00
    }

    pub fn rho11(&self) -> f64 {
        self.rho11
    }

    pub fn rho01(&self) -> Complex {
        self.rho01
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    fn with_coherence(&self, rho01: Complex) -> Self {
        Self { rho01, ..*self }
    }
}

/// Extracted decoherence rate and frequency shift on a time grid, with
/// per-point divergence flags.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTrace {
    times: Vec<f64>,
    gamma: Vec<f64>,
    shift: Vec<f64>,
    diverged: Vec<bool>,
}

impl RateTrace {
    /// Assembles a trace from precomputed values (closed forms); lengths
    /// must agree and the grid must be uniform.
    pub fn from_values(
        times: Vec<f64>,
        gamma: Vec<f64>,
        shift: Vec<f64>,
        diverged: Vec<bool>,
    ) -> Result<Self> {
        if times.len() != gamma.len()
            || times.len() != shift.len()
            || times.len() != diverged.len()
        {
            return Err(Error::Domain("rate trace arrays must have equal length"));
        }
        uniform_step(&times)?;
        Ok(Self {
            times,
            gamma,
            shift,
            diverged,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    pub fn diverged(&self) -> &[bool] {
        &self.diverged
    }

    pub fn any_diverged(&self) -> bool {
        self.diverged.iter().any(|&d| d)
    }
}

/// Complex time series, the common output shape of the closed-equation
/// solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTrace {
    pub times: Vec<f64>,
    pub f: Vec<Complex>,
}

fn uniform_step(times: &[f64]) -> Result<f64> {
    if times.len() < 2 {
        return Err(Error::Domain("time grid needs at least two points"));
    }
    let dt = times[1] - times[0];
    if !(dt > 0.0) {
        return Err(Error::Domain("time grid must be strictly increasing"));
    }
    for w in times.windows(2) {
        if ((w[1] - w[0]) - dt).abs() > GRID_TOL * dt {
            return Err(Error::Domain("time grid must be uniform"));
        }
    }
    Ok(dt)
}

/// Coherence evolution under a known decoherence function:
/// `rho01(t) = F(t) e^{i omega0 t} rho01(0)`, populations unchanged.
pub fn evolve_coherence(
    initial: &TwoLevelState,
    times: &[f64],
    f: &[Complex],
) -> Result<Vec<TwoLevelState>> {
    if times.len() != f.len() || times.is_empty() {
        return Err(Error::Domain("times and F trace must have equal nonzero length"));
    }
    if (f[0] - Complex::new(1.0, 0.0)).norm() > 1e-12 {
        return Err(Error::Domain("F trace must start at 1"));
    }
    Ok(times
        .iter()
        .zip(f)
        .map(|(&t, &ft)| {
            let phase = Complex::new(0.0, initial.omega0() * t).exp();
            initial.with_coherence(ft * phase * initial.rho01())
        })
        .collect())
}

/// Extracts `Gamma = -Re[(dF/dt)/F]` and `S = -Im[(dF/dt)/F]` from a trace
/// on a uniform grid: central differences inside, one-sided second-order
/// stencils at the endpoints.  Points with `|F| < EPS_DIV` (or non-finite
/// ratios) come back flagged.
pub fn extract_rates(times: &[f64], f: &[Complex]) -> Result<RateTrace> {
    if times.len() != f.len() {
        return Err(Error::Domain("times and F trace must have equal length"));
    }
    let dt = uniform_step(times)?;
    let n = times.len();
    let mut gamma = Vec::with_capacity(n);
    let mut shift = Vec::with_capacity(n);
    let mut diverged = Vec::with_capacity(n);
    for i in 0..n {
        let df = if i == 0 {
            if n >= 3 {
                (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dt)
            } else {
                (f[1] - f[0]) / dt
            }
        } else if i == n - 1 {
            if n >= 3 {
                (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dt)
            } else {
                (f[1] - f[0]) / dt
            }
        } else {
            (f[i + 1] - f[i - 1]) / (2.0 * dt)
        };
        if f[i].norm() < EPS_DIV {
            gamma.push(f64::INFINITY);
            shift.push(f64::INFINITY);
            diverged.push(true);
            continue;
        }
        let ratio = df / f[i];
        let ok = ratio.re.is_finite() && ratio.im.is_finite();
        gamma.push(-ratio.re);
        shift.push(-ratio.im);
        diverged.push(!ok);
    }
    RateTrace::from_values(times.to_vec(), gamma, shift, diverged)
}

/// Propagates the time-local dephasing master equation
/// `d rho01/dt = [i omega0 - Gamma(t) - i S(t)] rho01` along the rate
/// trace.  Populations are exactly constant.  Refuses windows containing
/// divergence flags.
///
/// The coefficient integral uses derivative-corrected trapezoid steps
/// (`O(dt^4)` locally), so a 1e-3 grid round-trips the coherence modulus
/// well inside 1e-6.
pub fn propagate_master_equation(
    initial: &TwoLevelState,
    rates: &RateTrace,
) -> Result<Vec<TwoLevelState>> {
    if rates.any_diverged() {
        return Err(Error::Numerical(
            "rate trace contains divergence flags; cannot propagate through them",
        ));
    }
    let times = rates.times();
    let dt = uniform_step(times)?;
    let n = times.len();
    // z(t) = i omega0 - Gamma - i S; rho01(t) = e^{int z} rho01(0).
    let z: Vec<Complex> = (0..n)
        .map(|i| Complex::new(-rates.gamma()[i], initial.omega0() - rates.shift()[i]))
        .collect();
    // Central-difference slopes of z for the trapezoid correction term.
    let dz = |i: usize| -> Complex {
        if i == 0 {
            if n >= 3 {
                (-3.0 * z[0] + 4.0 * z[1] - z[2]) / (2.0 * dt)
            } else {
                (z[1] - z[0]) / dt
            }
        } else if i == n - 1 {
            if n >= 3 {
                (3.0 * z[n - 1] - 4.0 * z[n - 2] + z[n - 3]) / (2.0 * dt)
            } else {
                (z[1] - z[0]) / dt
            }
        } else {
            (z[i + 1] - z[i - 1]) / (2.0 * dt)
        }
    };
    let mut states = Vec::with_capacity(n);
    states.push(*initial);
    let mut integral = Complex::new(0.0, 0.0);
    for i in 1..n {
        integral += 0.5 * dt * (z[i - 1] + z[i]) - dt * dt / 12.0 * (dz(i) - dz(i - 1));
        states.push(initial.with_coherence(integral.exp() * initial.rho01()));
    }
    Ok(states)
}

/// Second-order time-convolutionless equation for OU-linear coupling:
/// `dF/dt = i c <x(t)> F - c^2 [int_0^t <x(t) x(t')>_oc dt'] F`.
///
/// The cumulant integral is carried as two auxiliary linear ODEs
/// (`u' = 1 - gamma u`, `w' = 2 e^{-2 gamma t} - e^{-gamma t} ...` in the
/// combination `G = sigma^2 (u - b^2 w)`), and the triple is stepped with
/// classic RK4.  The closure is exact for this Gaussian process, so the
/// result reproduces the closed form to integrator accuracy.
pub fn tcl2_solve_ou_linear(
    p: &OuParams,
    coupling: &Coupling,
    dt: f64,
    t_max: f64,
) -> Result<ComplexTrace> {
    if coupling.k() != 1 {
        return Err(Error::Incompatible(
            "the second-order closure is exact only for linear coupling",
        ));
    }
    if !(dt > 0.0) || !(t_max > 0.0) {
        return Err(Error::Parameter("dt and t_max must be positive"));
    }
    let g = p.gamma();
    let s2 = p.sigma() * p.sigma();
    let b2 = p.b() * p.b();
    let c = coupling.c();
    // State (F, u, w): u(t) = (1 - e^{-gamma t})/gamma and
    // w(t) = (e^{-gamma t} - e^{-2 gamma t})/gamma solve
    // u' = 1 - gamma u, w' = 2 e^{-2 gamma t} - e^{-gamma t} - ... as below;
    // G(t) = int_0^t cumulant = sigma^2 (u - b^2 w).
    let deriv = |t: f64, f: Complex, u: f64, w: f64| {
        let e1 = (-g * t).exp();
        let e2 = e1 * e1;
        let big_g = s2 * (u - b2 * w);
        let df = (Complex::new(0.0, c * ou_mean(t, p)) - c * c * big_g) * f;
        (df, 1.0 - g * u, 2.0 * e2 - e1)
    };
    let n_steps = ((t_max / dt).ceil() as usize).max(1);
    let dt = t_max / n_steps as f64;
    let mut f = Complex::new(1.0, 0.0);
    let (mut u, mut w) = (0.0, 0.0);
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut trace = Vec::with_capacity(n_steps + 1);
    times.push(0.0);
    trace.push(f);
    for step in 0..n_steps {
        let t = step as f64 * dt;
        let (f1, u1, w1) = deriv(t, f, u, w);
        let (f2, u2, w2) = deriv(t + 0.5 * dt, f + 0.5 * dt * f1, u + 0.5 * dt * u1, w + 0.5 * dt * w1);
        let (f3, u3, w3) = deriv(t + 0.5 * dt, f + 0.5 * dt * f2, u + 0.5 * dt * u2, w + 0.5 * dt * w2);
        let (f4, u4, w4) = deriv(t + dt, f + dt * f3, u + dt * u3, w + dt * w3);
        f += dt / 6.0 * (f1 + 2.0 * f2 + 2.0 * f3 + f4);
        u += dt / 6.0 * (u1 + 2.0 * u2 + 2.0 * u3 + u4);
        w += dt / 6.0 * (w1 + 2.0 * w2 + 2.0 * w3 + w4);
        times.push((step + 1) as f64 * dt);
        trace.push(f);
    }
    Ok(ComplexTrace { times, f: trace })
}

/// Time-convolution (Volterra) equation for RTN-linear coupling:
/// `dF/dt = -c^2 int_0^t nu^2 e^{-2 lambda (t - t')} F(t') dt'
///          + i c a nu e^{-2 lambda t}`.
///
/// The exponential kernel is converted to the auxiliary ODE
/// `z' = F - 2 lambda z`, so the cost is linear in the step count; the pair
/// is stepped with classic RK4.
pub fn volterra_solve_rtn_linear(
    p: &RtnParams,
    coupling: &Coupling,
    dt: f64,
    t_max: f64,
) -> Result<ComplexTrace> {
    if coupling.k() != 1 {
        return Err(Error::Incompatible(
            "the closed time-convolution equation holds only for linear coupling",
        ));
    }
    if !(dt > 0.0) || !(t_max > 0.0) {
        return Err(Error::Parameter("dt and t_max must be positive"));
    }
    let lam = p.lambda();
    let nu = p.nu();
    let c = coupling.c();
    let deriv = |t: f64, f: Complex, z: Complex| {
        let df = -c * c * nu * nu * z + Complex::new(0.0, c * p.a() * nu * (-2.0 * lam * t).exp());
        let dz = f - 2.0 * lam * z;
        (df, dz)
    };
    let n_steps = ((t_max / dt).ceil() as usize).max(1);
    let dt = t_max / n_steps as f64;
    let mut f = Complex::new(1.0, 0.0);
    let mut z = Complex::new(0.0, 0.0);
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut trace = Vec::with_capacity(n_steps + 1);
    times.push(0.0);
    trace.push(f);
    for step in 0..n_steps {
        let t = step as f64 * dt;
        let (f1, z1) = deriv(t, f, z);
        let (f2, z2) = deriv(t + 0.5 * dt, f + 0.5 * dt * f1, z + 0.5 * dt * z1);
        let (f3, z3) = deriv(t + 0.5 * dt, f + 0.5 * dt * f2, z + 0.5 * dt * z2);
        let (f4, z4) = deriv(t + dt, f + dt * f3, z + dt * z3);
        f += dt / 6.0 * (f1 + 2.0 * f2 + 2.0 * f3 + f4);
        z += dt / 6.0 * (z1 + 2.0 * z2 + 2.0 * z3 + z4);
        times.push((step + 1) as f64 * dt);
        trace.push(f);
    }
    Ok(ComplexTrace { times, f: trace })
}
