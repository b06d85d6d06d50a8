//! Direct numerical solution of the stochastic Liouville equation for the
//! marginal average `F(x,t)` and its reduction to `F(t)`.
//!
//! For OU noise the marginal obeys the complex Fokker-Planck PDE
//! `dF/dt = i c x^k F + gamma d/dx (x F) + gamma sigma^2 d2F/dx2`,
//! discretized in conservative finite-volume form on a truncated domain
//! with zero-flux boundaries and stepped implicitly.  For RTN the marginal
//! reduces to two coupled complex ODEs on the states `+-nu`, stepped with
//! classic RK4.  Both serve as independent cross-checks of the closed forms
//! in `analytic`.

// Needed for f64 math in no_std builds; with std the inherent methods win.
#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec;
use alloc::vec::Vec;

use crate::analytic::QuadraticOuDerived;
use crate::noise::{Coupling, OuParams, RtnParams};
use crate::{Complex, Error, Result};

/// Time-stepping scheme for the OU marginal PDE.  Both are unconditionally
/// stable implicit schemes; the `i c x^k` source is stiff at large `|x|` for
/// `k = 2`, which rules out explicit stepping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Second order in time (default).
    CrankNicolson,
    /// First order in time; strongly damping, useful as a cross-check.
    BackwardEuler,
}

/// Space/time discretization of the OU marginal PDE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    x_half_width: f64,
    n_x: usize,
    dt: f64,
    t_max: f64,
    scheme: Scheme,
}

impl GridSpec {
    /// Default resolution: domain `+-8 sigma`, 1025 nodes (odd, so `x = 0`
    /// is a node), Crank-Nicolson.
    pub fn new(dt: f64, t_max: f64) -> Result<Self> {
        Self::with_resolution(dt, t_max, 8.0, 1025)
    }

    pub fn with_resolution(dt: f64, t_max: f64, x_half_width: f64, n_x: usize) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Parameter("grid time step must be positive"));
        }
        if !(t_max >= 0.0) || !t_max.is_finite() {
            return Err(Error::Parameter("grid horizon must be nonnegative"));
        }
        if !(x_half_width >= 6.0) {
            return Err(Error::Parameter("x half-width must be at least 6 sigma"));
        }
        if n_x < 65 || n_x.is_multiple_of(2) {
            return Err(Error::Parameter("n_x must be odd and at least 65"));
        }
        Ok(Self {
            x_half_width,
            n_x,
            dt,
            t_max,
            scheme: Scheme::CrankNicolson,
        })
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    /// Same spatial and temporal resolution doubled, for convergence studies
    /// (node count goes `n -> 2n - 1` so existing nodes are preserved).
    pub fn refined(self) -> Self {
        Self {
            dt: self.dt / 2.0,
            n_x: 2 * self.n_x - 1,
            ..self
        }
    }

    pub fn x_half_width(&self) -> f64 {
        self.x_half_width
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }
}

/// Result of an OU marginal PDE solve: the reduced `F(t)` on the full time
/// grid plus decimated snapshots of the field itself.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalField {
    x: Vec<f64>,
    times: Vec<f64>,
    f: Vec<Complex>,
    snapshot_times: Vec<f64>,
    snapshots: Vec<Vec<Complex>>,
}

impl MarginalField {
    /// Spatial nodes.
    pub fn x(&self) -> &[f64] {
        &self.x
    }

    /// Time grid (uniform, starting at 0).
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Reduced decoherence function `F(t)`, trapezoid integral of the field.
    pub fn f(&self) -> &[Complex] {
        &self.f
    }

    /// Times at which full field snapshots were retained.
    pub fn snapshot_times(&self) -> &[f64] {
        &self.snapshot_times
    }

    /// Retained field snapshots, parallel to `snapshot_times`.
    pub fn snapshots(&self) -> &[Vec<Complex>] {
        &self.snapshots
    }

    /// Field value at the snapshot closest to `t`, linearly interpolated in
    /// `x` between nodes.
    pub fn field_at(&self, t: f64, x: f64) -> Option<Complex> {
        let idx = self
            .snapshot_times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().partial_cmp(&(b.1 - t).abs()).unwrap())?
            .0;
        let snap = &self.snapshots[idx];
        let h = self.x[1] - self.x[0];
        let pos = (x - self.x[0]) / h;
        if pos < 0.0 || pos > (self.x.len() - 1) as f64 {
            return None;
        }
        let i = (pos.floor() as usize).min(self.x.len() - 2);
        let w = pos - i as f64;
        Some(snap[i] * (1.0 - w) + snap[i + 1] * w)
    }
}

/// Trapezoid reduction of a field to its integral over `x`.
fn reduce_trapezoid(field: &[Complex], h: f64) -> Complex {
    let mut sum = Complex::new(0.0, 0.0);
    for v in &field[1..field.len() - 1] {
        sum += *v;
    }
    sum += 0.5 * (field[0] + field[field.len() - 1]);
    sum * h
}

/// Tridiagonal system with a frozen LU factorization, reused every step.
struct FrozenTridiag {
    inv_diag: Vec<Complex>,
    upper_scaled: Vec<Complex>,
    lower: Vec<Complex>,
}

impl FrozenTridiag {
    /// Factorizes `(lower, diag, upper)` by the Thomas algorithm.
    fn new(lower: &[Complex], diag: &[Complex], upper: &[Complex]) -> Result<Self> {
        let n = diag.len();
        let mut inv_diag = vec![Complex::new(0.0, 0.0); n];
        let mut upper_scaled = vec![Complex::new(0.0, 0.0); n - 1];
        let mut denom = diag[0];
        for i in 0..n {
            if denom.norm() < 1e-300 {
                return Err(Error::Numerical("singular tridiagonal matrix"));
            }
            inv_diag[i] = denom.inv();
            if i < n - 1 {
                upper_scaled[i] = upper[i] * inv_diag[i];
                denom = diag[i + 1] - lower[i] * upper_scaled[i];
            }
        }
        Ok(Self {
            inv_diag,
            upper_scaled,
            lower: lower.to_vec(),
        })
    }

    /// Solves in place.
    fn solve(&self, d: &mut [Complex]) {
        let n = d.len();
        d[0] *= self.inv_diag[0];
        for i in 1..n {
            d[i] = (d[i] - self.lower[i - 1] * d[i - 1]) * self.inv_diag[i];
        }
        for i in (0..n - 1).rev() {
            let next = d[i + 1];
            d[i] -= self.upper_scaled[i] * next;
        }
    }
}

/// Spatial operator `A` of the semi-discrete system `dF/dt = A F` in
/// tridiagonal form, flux-conservative with zero flux through both walls.
fn build_operator(
    x: &[f64],
    h: f64,
    p: &OuParams,
    coupling: &Coupling,
) -> (Vec<Complex>, Vec<Complex>, Vec<Complex>) {
    let n = x.len();
    let g = p.gamma();
    let s2 = p.sigma() * p.sigma();
    let c = coupling.c();
    let k = coupling.k();
    let mut lower = vec![Complex::new(0.0, 0.0); n - 1];
    let mut diag = vec![Complex::new(0.0, 0.0); n];
    let mut upper = vec![Complex::new(0.0, 0.0); n - 1];
    // Face flux G_{i+1/2} = gamma [x_{i+1/2} (F_i + F_{i+1})/2
    //                              + sigma^2 (F_{i+1} - F_i)/h];
    // dF_i/dt = i c x_i^k F_i + (G_{i+1/2} - G_{i-1/2})/h, boundary fluxes 0.
    for i in 0..n {
        let xk = if k == 1 { x[i] } else { x[i] * x[i] };
        let mut d = Complex::new(0.0, c * xk);
        if i < n - 1 {
            let xf = 0.5 * (x[i] + x[i + 1]);
            d += Complex::new(g * (0.5 * xf - s2 / h) / h, 0.0);
            upper[i] = Complex::new(g * (0.5 * xf + s2 / h) / h, 0.0);
        }
        if i > 0 {
            let xf = 0.5 * (x[i - 1] + x[i]);
            d += Complex::new(g * (-0.5 * xf - s2 / h) / h, 0.0);
            lower[i - 1] = Complex::new(g * (0.5 * xf - s2 / h) / (-h), 0.0);
        }
        diag[i] = d;
    }
    (lower, diag, upper)
}

/// Solves the OU marginal PDE and reduces it to `F(t)`.
///
/// Snapshots of the full field are retained at up to ~200 evenly spaced
/// times (always including `t = 0` and `t_max`).
pub fn solve_ou_marginal(
    p: &OuParams,
    coupling: &Coupling,
    grid: &GridSpec,
) -> Result<MarginalField> {
    let n = grid.n_x();
    let half = grid.x_half_width() * p.sigma();
    let h = 2.0 * half / (n - 1) as f64;
    let x: Vec<f64> = (0..n).map(|i| -half + i as f64 * h).collect();

    // Initial law N(b chi, sigma^2 (1 - b^2)) sampled at the nodes.
    let var0 = p.sigma() * p.sigma() * (1.0 - p.b() * p.b());
    let norm0 = 1.0 / (2.0 * core::f64::consts::PI * var0).sqrt();
    let mut field: Vec<Complex> = x
        .iter()
        .map(|&xi| {
            let d = xi - p.b() * p.chi();
            Complex::new(norm0 * (-d * d / (2.0 * var0)).exp(), 0.0)
        })
        .collect();

    let n_steps = if grid.t_max() == 0.0 {
        0
    } else {
        ((grid.t_max() / grid.dt()).ceil() as usize).max(1)
    };
    let dt = if n_steps == 0 { grid.dt() } else { grid.t_max() / n_steps as f64 };

    let (lower, diag, upper) = build_operator(&x, h, p, coupling);
    // theta scheme: (I - theta dt A) F' = (I + (1-theta) dt A) F.
    let theta = match grid.scheme() {
        Scheme::CrankNicolson => 0.5,
        Scheme::BackwardEuler => 1.0,
    };
    let one = Complex::new(1.0, 0.0);
    let im_lower: Vec<Complex> = lower.iter().map(|&v| -theta * dt * v).collect();
    let im_diag: Vec<Complex> = diag.iter().map(|&v| one - theta * dt * v).collect();
    let im_upper: Vec<Complex> = upper.iter().map(|&v| -theta * dt * v).collect();
    let solver = FrozenTridiag::new(&im_lower, &im_diag, &im_upper)?;
    let ex = (1.0 - theta) * dt;

    let snap_stride = (n_steps / 200).max(1);
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut f_trace = Vec::with_capacity(n_steps + 1);
    let mut snapshot_times = Vec::new();
    let mut snapshots = Vec::new();
    times.push(0.0);
    f_trace.push(reduce_trapezoid(&field, h));
    snapshot_times.push(0.0);
    snapshots.push(field.clone());

    let mut rhs = vec![Complex::new(0.0, 0.0); n];
    for step in 1..=n_steps {
        for i in 0..n {
            let mut v = field[i] + ex * (diag[i] * field[i]);
            if i > 0 {
                v += ex * (lower[i - 1] * field[i - 1]);
            }
            if i < n - 1 {
                v += ex * (upper[i] * field[i + 1]);
            }
            rhs[i] = v;
        }
        solver.solve(&mut rhs);
        core::mem::swap(&mut field, &mut rhs);
        let t = step as f64 * dt;
        let reduced = reduce_trapezoid(&field, h);
        if !reduced.re.is_finite() || !reduced.im.is_finite() {
            return Err(Error::Numerical("PDE field became non-finite"));
        }
        times.push(t);
        f_trace.push(reduced);
        if step % snap_stride == 0 || step == n_steps {
            snapshot_times.push(t);
            snapshots.push(field.clone());
        }
    }

    Ok(MarginalField {
        x,
        times,
        f: f_trace,
        snapshot_times,
        snapshots,
    })
}

/// Closed-form marginal average `F(x,t)` for OU noise.
///
/// Linear coupling: conditioning the jointly Gaussian pair
/// `(int_0^t x dt', x(t))` on `x(t) = x` gives a complex-shifted Gaussian of
/// variance `sigma^2 (1 - b^2 e^{-2 gamma t})` with mean
/// `mu = b chi e^{-gamma t} + i c Cov(int x, x(t))`, where
/// `Cov = (sigma^2 / gamma) eta (1 - b^2 e^{-gamma t})`, times the reduced
/// closed form `F(t)` as a constant factor.
///
/// Quadratic coupling: complex Gaussian with parameters built from
/// `epsilon` and `ell_+-`; the prefactor square root is factorized the same
/// way as in the reduced closed form so it stays on one branch for all `t`.
pub fn ou_marginal_closed_form(x: f64, t: f64, p: &OuParams, coupling: &Coupling) -> Complex {
    let g = p.gamma();
    let s2 = p.sigma() * p.sigma();
    let b = p.b();
    let c = coupling.c();
    if coupling.k() == 1 {
        let e = (-g * t).exp();
        let eta = 1.0 - e;
        let var = s2 * (1.0 - b * b * e * e);
        let mu = Complex::new(b * p.chi() * e, c * s2 / g * eta * (1.0 - b * b * e));
        let dx = Complex::new(x, 0.0) - mu;
        let tail = crate::analytic::ou_linear_f(t, p, c);
        let gauss = (-dx * dx / (2.0 * var)).exp()
            / (2.0 * core::f64::consts::PI * var).sqrt();
        gauss * tail
    } else {
        let d = QuadraticOuDerived::new(p, c);
        let eps = d.epsilon;
        let e1 = (-eps * g * t).exp();
        let e2 = e1 * e1;
        // A = ell_+ (1 + w), |w| < 1; principal roots of both factors keep
        // the prefactor continuous with the correct value at t = 0.
        let w = d.ell_minus / d.ell_plus * e2;
        let a_t = d.ell_plus * (Complex::new(1.0, 0.0) + w);
        let prefactor = (eps / (core::f64::consts::PI * s2 * d.ell_plus)).sqrt()
            / (Complex::new(1.0, 0.0) + w).sqrt();
        let bchi = b * p.chi();
        let quad = (d.ell_minus * (eps - 1.0) * e2 - d.ell_plus * (eps + 1.0))
            / (4.0 * s2 * a_t)
            * (x * x);
        let lin = 2.0 * bchi * eps * e1 / (s2 * a_t) * x;
        let cons = -bchi * bchi * ((eps + 1.0) * e2 + eps - 1.0) / (2.0 * s2 * a_t)
            - 0.5 * g * (eps - 1.0) * t;
        prefactor * (quad + lin + cons).exp()
    }
}

/// Adaptive Simpson quadrature of the closed-form marginal over `x`,
/// reproducing the reduced `F(t)`.  Absolute tolerance 1e-10 on each of the
/// real and imaginary parts; the domain `+-16 sigma` keeps the truncated
/// tails far below it.
pub fn integrate_marginal_closed_form(t: f64, p: &OuParams, coupling: &Coupling) -> Complex {
    let half = 16.0 * p.sigma();
    let f = |x: f64| ou_marginal_closed_form(x, t, p, coupling);
    adaptive_simpson(&f, -half, half, 1e-10, 40)
}

fn adaptive_simpson<F: Fn(f64) -> Complex>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
) -> Complex {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> Complex>(
    f: &F,
    a: f64,
    b: f64,
    fa: Complex,
    fm: Complex,
    fb: Complex,
    whole: Complex,
    tol: f64,
    depth: u32,
) -> Complex {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || (delta.re.abs() <= 15.0 * tol && delta.im.abs() <= 15.0 * tol) {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Result of the two-state RTN marginal solve.
#[derive(Debug, Clone, PartialEq)]
pub struct RtnMarginals {
    pub times: Vec<f64>,
    pub plus: Vec<Complex>,
    pub minus: Vec<Complex>,
    pub f: Vec<Complex>,
}

/// Integrates the two coupled marginal ODEs
/// `dF(+-nu)/dt = i c (+-nu)^k F(+-nu) - lambda F(+-nu) + lambda F(-+nu)`
/// from `F(+-nu, 0) = (1 +- a)/2` with classic RK4.
///
/// Requires `dt <= 0.01 / max(lambda, |c| nu^k)` so the stated 1e-8
/// agreement with the closed forms holds.
pub fn solve_rtn_marginal(
    p: &RtnParams,
    coupling: &Coupling,
    dt: f64,
    t_max: f64,
) -> Result<RtnMarginals> {
    if !(dt > 0.0) || !(t_max >= 0.0) || !dt.is_finite() || !t_max.is_finite() {
        return Err(Error::Parameter("dt must be positive and t_max nonnegative"));
    }
    let c = coupling.c();
    let nu_k = if coupling.k() == 1 { p.nu() } else { p.nu() * p.nu() };
    let rate_scale = p.lambda().max((c * nu_k).abs());
    if dt > 0.01 / rate_scale {
        return Err(Error::Domain("dt exceeds 0.01 / max(lambda, |c| nu^k)"));
    }

    let lam = p.lambda();
    // Phase rates on the two states: +-c nu for k = 1, c nu^2 on both for k = 2.
    let (wp, wm) = if coupling.k() == 1 {
        (c * p.nu(), -c * p.nu())
    } else {
        (c * p.nu() * p.nu(), c * p.nu() * p.nu())
    };
    let deriv = |fp: Complex, fm: Complex| {
        (
            Complex::new(0.0, wp) * fp - lam * fp + lam * fm,
            Complex::new(0.0, wm) * fm - lam * fm + lam * fp,
        )
    };

    let n_steps = if t_max == 0.0 {
        0
    } else {
        ((t_max / dt).ceil() as usize).max(1)
    };
    let dt = if n_steps == 0 { dt } else { t_max / n_steps as f64 };

    let mut fp = Complex::new(0.5 * (1.0 + p.a()), 0.0);
    let mut fm = Complex::new(0.5 * (1.0 - p.a()), 0.0);
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut plus = Vec::with_capacity(n_steps + 1);
    let mut minus = Vec::with_capacity(n_steps + 1);
    let mut f = Vec::with_capacity(n_steps + 1);
    times.push(0.0);
    plus.push(fp);
    minus.push(fm);
    f.push(fp + fm);
    for step in 1..=n_steps {
        let (k1p, k1m) = deriv(fp, fm);
        let (k2p, k2m) = deriv(fp + 0.5 * dt * k1p, fm + 0.5 * dt * k1m);
        let (k3p, k3m) = deriv(fp + 0.5 * dt * k2p, fm + 0.5 * dt * k2m);
        let (k4p, k4m) = deriv(fp + dt * k3p, fm + dt * k3m);
        fp += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        fm += dt / 6.0 * (k1m + 2.0 * k2m + 2.0 * k3m + k4m);
        times.push(step as f64 * dt);
        plus.push(fp);
        minus.push(fm);
        f.push(fp + fm);
    }
    Ok(RtnMarginals {
        times,
        plus,
        minus,
        f,
    })
}
