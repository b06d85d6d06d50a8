//! Noise parameter types, exact probability laws, analytic moments and
//! exact trajectory samplers for nonstationary OUN and RTN.
//!
//! The OU sampler uses the exact Gaussian transition kernel, so there is no
//! step-size bias regardless of the sampling grid.  The RTN sampler is
//! event-driven with exponential waiting times and stores the switch times
//! exactly, which makes downstream phase integrals exact as well.

use alloc::vec::Vec;

// Needed for f64 math in no_std builds; with std the inherent methods win.
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};

use crate::{Error, Result};

const SQRT_TAU: f64 = 2.506_628_274_631_000_7; // sqrt(2*pi)

/// Parameters of a nonstationary Ornstein-Uhlenbeck noise.
///
/// `gamma` is the relaxation rate (spectral width), `sigma` the stationary
/// standard deviation (coupling strength).  The initial law is Gaussian with
/// mean `b*chi` and variance `sigma^2 (1 - b^2)`; `b = 0` recovers the
/// standard stationary OUN.
///
/// Note on wording: only `b = 0` yields a strictly stationary process.  For
/// `b != 0, chi = 0` the initial variance `sigma^2 (1 - b^2)` relaxes to
/// `sigma^2`, so the single-point law is still time dependent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuParams {
    gamma: f64,
    sigma: f64,
    b: f64,
    chi: f64,
}

impl OuParams {
    pub fn new(gamma: f64, sigma: f64, b: f64, chi: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::Parameter("OUN decay rate gamma must be > 0"));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::Parameter("OUN standard deviation sigma must be > 0"));
        }
        if !(b.abs() < 1.0) {
            return Err(Error::Parameter(
                "OUN nonstationary parameter must satisfy |b| < 1",
            ));
        }
        if !chi.is_finite() {
            return Err(Error::Parameter("OUN initial-offset parameter chi must be finite"));
        }
        Ok(Self { gamma, sigma, b, chi })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }
}

/// Parameters of a nonstationary random telegraph noise taking values
/// `+nu`/`-nu` and switching at rate `lambda`.  The initial law puts weight
/// `(1 + a)/2` on `+nu`; `a = 0` recovers the standard stationary RTN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RtnParams {
    lambda: f64,
    nu: f64,
    a: f64,
}

impl RtnParams {
    pub fn new(lambda: f64, nu: f64, a: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Parameter("RTN switching rate lambda must be > 0"));
        }
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::Parameter("RTN transition amplitude nu must be > 0"));
        }
        if !(a.abs() <= 1.0) {
            return Err(Error::Parameter(
                "RTN nonstationary parameter must satisfy |a| <= 1",
            ));
        }
        Ok(Self { lambda, nu, a })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// Regime ratio `r = lambda / nu` separating weak (`|c| < r`) from
    /// strong (`|c| > r`) coupling.
    pub fn ratio(&self) -> f64 {
        self.lambda / self.nu
    }
}

/// The frequency-difference fluctuation `delta_omega(t) = c * x(t)^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    c: f64,
    k: u8,
}

impl Coupling {
    pub fn new(c: f64, k: u8) -> Result<Self> {
        if c == 0.0 || !c.is_finite() {
            return Err(Error::Parameter("coupling constant c must be nonzero and finite"));
        }
        if k != 1 && k != 2 {
            return Err(Error::Parameter("coupling exponent k must be 1 or 2"));
        }
        Ok(Self { c, k })
    }

    pub fn linear(c: f64) -> Result<Self> {
        Self::new(c, 1)
    }

    pub fn quadratic(c: f64) -> Result<Self> {
        Self::new(c, 2)
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    /// Evaluates `delta_omega = c * x^k`.
    pub fn delta_omega(&self, x: f64) -> f64 {
        match self.k {
            1 => self.c * x,
            _ => self.c * x * x,
        }
    }
}

/// Either noise model, for interfaces that dispatch over both.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    Ou(OuParams),
    Rtn(RtnParams),
}

/// One realization of the environmental noise.
///
/// `times` is strictly increasing and starts at 0; `values[i]` is the noise
/// value on `[times[i], times[i+1])`.  For OU paths the times are the sample
/// grid; for RTN paths they are 0 followed by the exact switch times, so the
/// path is piecewise-constant-exact and every value is `+nu` or `-nu`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePath {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl NoisePath {
    fn new(times: Vec<f64>, values: Vec<f64>) -> Self {
        debug_assert_eq!(times.len(), values.len());
        debug_assert!(times.first().is_none_or(|&t| t == 0.0));
        debug_assert!(times.windows(2).all(|w| w[0] < w[1]));
        Self { times, values }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Value held at time `t` (piecewise-constant interpretation).
    pub fn value_at(&self, t: f64) -> f64 {
        match self.times.partition_point(|&s| s <= t) {
            0 => self.values[0],
            i => self.values[i - 1],
        }
    }
}

/// OU transition law over a zero time lag degenerates to a Dirac delta; the
/// distinguished variant stands in for the infinite density value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OuTransition {
    /// `t == t0`: the law is `delta(x - x0)`.
    Delta,
    /// `t > t0`: a proper Gaussian density value.
    Density(f64),
}

fn gaussian_density(x: f64, mean: f64, variance: f64) -> f64 {
    let z = x - mean;
    (-z * z / (2.0 * variance)).exp() / (SQRT_TAU * variance.sqrt())
}

/// Transition density of the OUN: Gaussian with mean `x0 e^{-gamma dt}` and
/// variance `sigma^2 (1 - e^{-2 gamma dt})` for `dt = t - t0`.
pub fn ou_transition_density(
    x: f64,
    t: f64,
    x0: f64,
    t0: f64,
    p: &OuParams,
) -> Result<OuTransition> {
    if t < t0 {
        return Err(Error::Domain("OU transition density requires t >= t0"));
    }
    if t == t0 {
        return Ok(OuTransition::Delta);
    }
    let decay = (-p.gamma() * (t - t0)).exp();
    let mean = x0 * decay;
    let variance = p.sigma() * p.sigma() * (1.0 - decay * decay);
    Ok(OuTransition::Density(gaussian_density(x, mean, variance)))
}

/// Single-point density of the nonstationary OUN: Gaussian with mean
/// `b chi e^{-gamma t}` and variance `sigma^2 (1 - b^2 e^{-2 gamma t})`.
pub fn ou_single_point_density(x: f64, t: f64, p: &OuParams) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::Domain("OU single-point density requires t >= 0"));
    }
    let decay = (-p.gamma() * t).exp();
    let mean = p.b() * p.chi() * decay;
    let variance = p.sigma() * p.sigma() * (1.0 - p.b() * p.b() * decay * decay);
    Ok(gaussian_density(x, mean, variance))
}

/// Mean of the nonstationary OUN, `b chi e^{-gamma t}`.
pub fn ou_mean(t: f64, p: &OuParams) -> f64 {
    p.b() * p.chi() * (-p.gamma() * t).exp()
}

/// Two-time second moment `<x(t) x(t2)>` for `t >= t2 >= 0`.
pub fn ou_second_moment(t: f64, t2: f64, p: &OuParams) -> Result<f64> {
    if t2 < 0.0 || t < t2 {
        return Err(Error::Domain("OU second moment requires t >= t2 >= 0"));
    }
    let s2 = p.sigma() * p.sigma();
    let b2 = p.b() * p.b();
    let e_lag = (-p.gamma() * (t - t2)).exp();
    let e_t2 = (-2.0 * p.gamma() * t2).exp();
    Ok(e_lag * (s2 * (1.0 - b2 * e_t2) + b2 * p.chi() * p.chi() * e_t2))
}

/// Time-ordered second cumulant `sigma^2 [e^{-gamma(t-t2)} - b^2 e^{-gamma(t+t2)}]`.
pub fn ou_ordered_cumulant(t: f64, t2: f64, p: &OuParams) -> Result<f64> {
    if t2 < 0.0 || t < t2 {
        return Err(Error::Domain("OU ordered cumulant requires t >= t2 >= 0"));
    }
    let s2 = p.sigma() * p.sigma();
    let b2 = p.b() * p.b();
    Ok(s2 * ((-p.gamma() * (t - t2)).exp() - b2 * (-p.gamma() * (t + t2)).exp()))
}

fn rtn_state_sign(x: f64, p: &RtnParams, what: &'static str) -> Result<f64> {
    if x == p.nu() {
        Ok(1.0)
    } else if x == -p.nu() {
        Ok(-1.0)
    } else {
        let _ = what;
        Err(Error::Domain("RTN state value must be exactly +nu or -nu"))
    }
}

/// RTN transition probability: `(1 + e^{-2 lambda dt})/2` for staying,
/// `(1 - e^{-2 lambda dt})/2` for flipping.
pub fn rtn_transition_prob(x: f64, t: f64, x2: f64, t2: f64, p: &RtnParams) -> Result<f64> {
    if t < t2 {
        return Err(Error::Domain("RTN transition probability requires t >= t2"));
    }
    let s = rtn_state_sign(x, p, "x")?;
    let s2 = rtn_state_sign(x2, p, "x2")?;
    let e = (-2.0 * p.lambda() * (t - t2)).exp();
    Ok(0.5 * (1.0 + s * s2 * e))
}

/// Single-point probability `P(+-nu, t) = (1 +- a e^{-2 lambda t})/2`.
pub fn rtn_single_point(x: f64, t: f64, p: &RtnParams) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::Domain("RTN single-point probability requires t >= 0"));
    }
    let s = rtn_state_sign(x, p, "x")?;
    Ok(0.5 * (1.0 + s * p.a() * (-2.0 * p.lambda() * t).exp()))
}

/// Mean of the nonstationary RTN, `a nu e^{-2 lambda t}`.
///
/// The mean carries no factor of the coupling constant: it is the average of
/// the noise itself, `sum_x x P(x,t)` with the single-point law above, and
/// the Monte Carlo moment tests pin this form down.
pub fn rtn_mean(t: f64, p: &RtnParams) -> f64 {
    p.a() * p.nu() * (-2.0 * p.lambda() * t).exp()
}

/// Two-time second moment `nu^2 e^{-2 lambda (t - t2)}`, independent of `a`.
pub fn rtn_second_moment(t: f64, t2: f64, p: &RtnParams) -> Result<f64> {
    if t2 < 0.0 || t < t2 {
        return Err(Error::Domain("RTN second moment requires t >= t2 >= 0"));
    }
    Ok(p.nu() * p.nu() * (-2.0 * p.lambda() * (t - t2)).exp())
}

/// Counter-based trajectory stream: ChaCha keyed by the global seed with the
/// trajectory index as the stream number.  Identical output regardless of
/// how trajectories are distributed over threads.
pub fn trajectory_rng(seed: u64, trajectory: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trajectory);
    rng
}

/// Samples an OU path on the given grid with the exact Gaussian transition
/// kernel (no Euler-Maruyama discretization error).
pub fn sample_ou_path<R: Rng + ?Sized>(
    p: &OuParams,
    times: &[f64],
    rng: &mut R,
) -> Result<NoisePath> {
    if times.is_empty() {
        return Err(Error::Domain("OU sample grid must not be empty"));
    }
    if times[0] != 0.0 || times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain(
            "OU sample grid must be strictly increasing from 0",
        ));
    }
    let mut values = Vec::with_capacity(times.len());
    let s2 = p.sigma() * p.sigma();
    let b = p.b();
    let init_std = (s2 * (1.0 - b * b)).sqrt();
    let z: f64 = StandardNormal.sample(rng);
    let mut x = b * p.chi() + init_std * z;
    values.push(x);
    for w in times.windows(2) {
        let decay = (-p.gamma() * (w[1] - w[0])).exp();
        let std = (s2 * (1.0 - decay * decay)).sqrt();
        let z: f64 = StandardNormal.sample(rng);
        x = x * decay + std * z;
        values.push(x);
    }
    Ok(NoisePath::new(times.to_vec(), values))
}

/// Samples an RTN path event-driven up to `horizon`, storing the exact
/// switch times.
pub fn sample_rtn_path<R: Rng + ?Sized>(
    p: &RtnParams,
    horizon: f64,
    rng: &mut R,
) -> Result<NoisePath> {
    if !(horizon > 0.0) {
        return Err(Error::Domain("RTN horizon must be > 0"));
    }
    let exp = Exp::new(p.lambda()).expect("lambda > 0 by construction");
    let mut sign = if rng.random::<f64>() < 0.5 * (1.0 + p.a()) {
        1.0
    } else {
        -1.0
    };
    let mut times = Vec::new();
    let mut values = Vec::new();
    times.push(0.0);
    values.push(sign * p.nu());
    let mut t = exp.sample(rng);
    while t < horizon {
        sign = -sign;
        times.push(t);
        values.push(sign * p.nu());
        t += exp.sample(rng);
    }
    Ok(NoisePath::new(times, values))
}
