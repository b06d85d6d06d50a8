//! Trajectory-ensemble estimation of the decoherence function
//! `F(t) = <exp(i c int_0^t x^k dt')>` with standard errors.
//!
//! Determinism contract: each trajectory draws from its own counter-based
//! RNG stream, trajectories are accumulated sequentially inside fixed-size
//! chunks, and chunk sums are combined by pairwise reduction in chunk-index
//! order.  The result is bitwise identical no matter how the chunks were
//! distributed over threads, so callers may evaluate `accumulate_chunk` in
//! parallel and feed the ordered results to `trace_from_chunks`.

// Needed for f64 math in no_std builds; with std the inherent methods win.
#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec;
use alloc::vec::Vec;

use crate::noise::{
    sample_ou_path, sample_rtn_path, trajectory_rng, Coupling, NoiseModel, NoisePath, OuParams,
    RtnParams,
};
use crate::{Complex, Error, Result};

/// Trajectories per accumulation chunk.  Fixed so the reduction tree does
/// not depend on thread count.
pub const CHUNK: u64 = 4096;

/// Ensemble configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    n_traj: u64,
    seed: u64,
    sample_times: Vec<f64>,
    ou_substeps: u32,
}

impl EnsembleSpec {
    /// Default of 16 phase-integration substeps per output interval.
    pub fn new(n_traj: u64, seed: u64, sample_times: Vec<f64>) -> Result<Self> {
        Self::with_substeps(n_traj, seed, sample_times, 16)
    }

    pub fn with_substeps(
        n_traj: u64,
        seed: u64,
        sample_times: Vec<f64>,
        ou_substeps: u32,
    ) -> Result<Self> {
        if n_traj < 100 {
            return Err(Error::Parameter("ensemble needs at least 100 trajectories"));
        }
        if ou_substeps < 4 {
            return Err(Error::Parameter("ou_substeps must be at least 4"));
        }
        if sample_times.first() != Some(&0.0)
            || sample_times.windows(2).any(|w| w[0] >= w[1])
            || sample_times.iter().any(|t| !t.is_finite())
        {
            return Err(Error::Parameter(
                "sample times must be finite and strictly increasing from 0",
            ));
        }
        Ok(Self {
            n_traj,
            seed,
            sample_times,
            ou_substeps,
        })
    }

    pub fn n_traj(&self) -> u64 {
        self.n_traj
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn sample_times(&self) -> &[f64] {
        &self.sample_times
    }

    pub fn ou_substeps(&self) -> u32 {
        self.ou_substeps
    }

    /// Number of accumulation chunks covering the ensemble.
    pub fn n_chunks(&self) -> u64 {
        self.n_traj.div_ceil(CHUNK)
    }
}

/// Ensemble estimate of `F(t)` with per-point standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct McTrace {
    times: Vec<f64>,
    f: Vec<Complex>,
    se_re: Vec<f64>,
    se_im: Vec<f64>,
    n_traj: u64,
}

impl McTrace {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn f(&self) -> &[Complex] {
        &self.f
    }

    pub fn se_re(&self) -> &[f64] {
        &self.se_re
    }

    pub fn se_im(&self) -> &[f64] {
        &self.se_im
    }

    pub fn n_traj(&self) -> u64 {
        self.n_traj
    }
}

/// Running per-time-point sums over one chunk of trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct ChunkSums {
    count: u64,
    sum_re: Vec<f64>,
    sum_im: Vec<f64>,
    sum_re2: Vec<f64>,
    sum_im2: Vec<f64>,
}

impl ChunkSums {
    fn zeros(n_times: usize) -> Self {
        Self {
            count: 0,
            sum_re: vec![0.0; n_times],
            sum_im: vec![0.0; n_times],
            sum_re2: vec![0.0; n_times],
            sum_im2: vec![0.0; n_times],
        }
    }

    fn add_value(&mut self, idx: usize, v: Complex) {
        self.sum_re[idx] += v.re;
        self.sum_im[idx] += v.im;
        self.sum_re2[idx] += v.re * v.re;
        self.sum_im2[idx] += v.im * v.im;
    }

    fn merge(mut self, other: &ChunkSums) -> ChunkSums {
        self.count += other.count;
        for i in 0..self.sum_re.len() {
            self.sum_re[i] += other.sum_re[i];
            self.sum_im[i] += other.sum_im[i];
            self.sum_re2[i] += other.sum_re2[i];
            self.sum_im2[i] += other.sum_im2[i];
        }
        self
    }
}

/// Combines chunk sums pairwise in index order.
fn reduce_pairwise(chunks: &[ChunkSums]) -> ChunkSums {
    match chunks.len() {
        0 => unreachable!("at least one chunk by construction"),
        1 => chunks[0].clone(),
        n => {
            let mid = n / 2;
            reduce_pairwise(&chunks[..mid]).merge(&reduce_pairwise(&chunks[mid..]))
        }
    }
}

/// Trajectory index range of chunk `chunk` within the ensemble.
fn chunk_range(spec: &EnsembleSpec, chunk: u64) -> core::ops::Range<u64> {
    let start = chunk * CHUNK;
    start..spec.n_traj.min(start + CHUNK)
}

/// Exact RTN phase `c int_0^t x^k dt'` at each sample time; the integral is
/// a sum over piecewise-constant segments between the stored switch times.
/// For `k = 2` the integrand is the constant `nu^2`, so the phase is written
/// as `c nu^2 t` directly and every trajectory contributes identically.
fn rtn_phase_at(
    path: &NoisePath,
    p: &RtnParams,
    coupling: &Coupling,
    times: &[f64],
    out: &mut [f64],
) {
    let c = coupling.c();
    if coupling.k() == 2 {
        let rate = c * p.nu() * p.nu();
        for (o, &t) in out.iter_mut().zip(times) {
            *o = rate * t;
        }
        return;
    }
    let ev_times = path.times();
    let ev_values = path.values();
    let mut seg = 0usize;
    let mut acc = 0.0;
    for (o, &t) in out.iter_mut().zip(times) {
        while seg + 1 < ev_times.len() && ev_times[seg + 1] <= t {
            acc += ev_values[seg] * (ev_times[seg + 1] - ev_times[seg]);
            seg += 1;
        }
        *o = c * (acc + ev_values[seg] * (t - ev_times[seg]));
    }
}

/// Fine time grid for OU phase integration: `ou_substeps` equal substeps
/// per output interval.
fn ou_fine_grid(times: &[f64], substeps: u32) -> Vec<f64> {
    let sub = substeps as usize;
    let mut fine = Vec::with_capacity(1 + (times.len() - 1) * sub);
    fine.push(times[0]);
    for w in times.windows(2) {
        let dt = (w[1] - w[0]) / sub as f64;
        for l in 1..sub {
            fine.push(w[0] + l as f64 * dt);
        }
        fine.push(w[1]);
    }
    fine
}

fn ou_accumulate_trajectory(
    p: &OuParams,
    coupling: &Coupling,
    fine: &[f64],
    substeps: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
    sums: &mut ChunkSums,
) -> Result<()> {
    let path = sample_ou_path(p, fine, rng)?;
    let values = path.values();
    let mut phase = 0.0;
    let mut y_prev = coupling.delta_omega(values[0]);
    sums.add_value(0, Complex::new(1.0, 0.0));
    let mut out_idx = 1;
    for m in 1..fine.len() {
        let y = coupling.delta_omega(values[m]);
        phase += 0.5 * (y_prev + y) * (fine[m] - fine[m - 1]);
        y_prev = y;
        if m % substeps == 0 {
            sums.add_value(out_idx, Complex::new(0.0, phase).exp());
            out_idx += 1;
        }
    }
    Ok(())
}

/// Accumulates one chunk of trajectories into per-time sums.  Chunks are
/// independent; evaluating them on different threads is safe and does not
/// change the result.
pub fn accumulate_chunk(
    model: &NoiseModel,
    coupling: &Coupling,
    spec: &EnsembleSpec,
    chunk: u64,
) -> Result<ChunkSums> {
    if chunk >= spec.n_chunks() {
        return Err(Error::Domain("chunk index out of range"));
    }
    let times = spec.sample_times();
    let mut sums = ChunkSums::zeros(times.len());
    match model {
        NoiseModel::Ou(p) => {
            let substeps = spec.ou_substeps() as usize;
            let fine = ou_fine_grid(times, spec.ou_substeps());
            for traj in chunk_range(spec, chunk) {
                let mut rng = trajectory_rng(spec.seed(), traj);
                ou_accumulate_trajectory(p, coupling, &fine, substeps, &mut rng, &mut sums)?;
                sums.count += 1;
            }
        }
        NoiseModel::Rtn(p) => {
            let horizon = *times.last().expect("nonempty by construction");
            let mut phases = vec![0.0; times.len()];
            for traj in chunk_range(spec, chunk) {
                let mut rng = trajectory_rng(spec.seed(), traj);
                if horizon > 0.0 {
                    let path = sample_rtn_path(p, horizon, &mut rng)?;
                    rtn_phase_at(&path, p, coupling, times, &mut phases);
                }
                for (idx, &phi) in phases.iter().enumerate() {
                    sums.add_value(idx, Complex::new(0.0, phi).exp());
                }
                sums.count += 1;
            }
        }
    }
    Ok(sums)
}

/// Folds ordered chunk sums into the final trace (pairwise reduction, then
/// mean and standard error per time point).
pub fn trace_from_chunks(spec: &EnsembleSpec, chunks: &[ChunkSums]) -> Result<McTrace> {
    if chunks.len() as u64 != spec.n_chunks() {
        return Err(Error::Domain("chunk list does not cover the ensemble"));
    }
    let total = reduce_pairwise(chunks);
    if total.count != spec.n_traj() {
        return Err(Error::Domain("chunk sums cover the wrong trajectory count"));
    }
    let n = total.count as f64;
    let n_times = spec.sample_times().len();
    let mut f = Vec::with_capacity(n_times);
    let mut se_re = Vec::with_capacity(n_times);
    let mut se_im = Vec::with_capacity(n_times);
    for i in 0..n_times {
        let mean_re = total.sum_re[i] / n;
        let mean_im = total.sum_im[i] / n;
        f.push(Complex::new(mean_re, mean_im));
        // Sample variance via sum of squares.  Deviation sums below 1e-12 of
        // the square-sum scale are pure cancellation noise (identical
        // contributions, e.g. a deterministic phase) and count as zero.
        let dev_re = total.sum_re2[i] - total.sum_re[i] * mean_re;
        let dev_im = total.sum_im2[i] - total.sum_im[i] * mean_im;
        let floor_re = 1e-12 * total.sum_re2[i].abs();
        let floor_im = 1e-12 * total.sum_im2[i].abs();
        let var_re = if dev_re <= floor_re { 0.0 } else { dev_re / (n - 1.0) };
        let var_im = if dev_im <= floor_im { 0.0 } else { dev_im / (n - 1.0) };
        se_re.push((var_re / n).sqrt());
        se_im.push((var_im / n).sqrt());
    }
    Ok(McTrace {
        times: spec.sample_times().to_vec(),
        f,
        se_re,
        se_im,
        n_traj: spec.n_traj(),
    })
}

/// Single-threaded end-to-end estimate of `F(t)`.
pub fn estimate_f(
    model: &NoiseModel,
    coupling: &Coupling,
    spec: &EnsembleSpec,
) -> Result<McTrace> {
    let chunks: Result<Vec<ChunkSums>> = (0..spec.n_chunks())
        .map(|chunk| accumulate_chunk(model, coupling, spec, chunk))
        .collect();
    trace_from_chunks(spec, &chunks?)
}

/// Accumulates one chunk of the conditional (marginal) sums
/// `<e^{i phi(t)} 1[x(t) = +-nu]>` for RTN.
pub fn accumulate_marginal_chunk(
    p: &RtnParams,
    coupling: &Coupling,
    spec: &EnsembleSpec,
    chunk: u64,
) -> Result<(ChunkSums, ChunkSums)> {
    if chunk >= spec.n_chunks() {
        return Err(Error::Domain("chunk index out of range"));
    }
    let times = spec.sample_times();
    let horizon = *times.last().expect("nonempty by construction");
    let mut plus = ChunkSums::zeros(times.len());
    let mut minus = ChunkSums::zeros(times.len());
    let mut phases = vec![0.0; times.len()];
    for traj in chunk_range(spec, chunk) {
        let mut rng = trajectory_rng(spec.seed(), traj);
        let path = if horizon > 0.0 {
            Some(sample_rtn_path(p, horizon, &mut rng)?)
        } else {
            None
        };
        if let Some(path) = &path {
            rtn_phase_at(path, p, coupling, times, &mut phases);
        }
        for (idx, &t) in times.iter().enumerate() {
            let value = Complex::new(0.0, phases[idx]).exp();
            let on_plus = match &path {
                Some(path) => path.value_at(t) > 0.0,
                // Zero-horizon degenerate grid: state undetermined, split by
                // the initial draw is impossible without a path; not reached
                // because sample_times has at least the point 0 and any
                // longer grid has horizon > 0.
                None => true,
            };
            if on_plus {
                plus.add_value(idx, value);
                minus.add_value(idx, Complex::new(0.0, 0.0));
            } else {
                minus.add_value(idx, value);
                plus.add_value(idx, Complex::new(0.0, 0.0));
            }
        }
        plus.count += 1;
        minus.count += 1;
    }
    Ok((plus, minus))
}

/// Conditional ensemble averages estimating the RTN marginals
/// `F(+-nu, t)`.
pub fn estimate_marginals_rtn(
    p: &RtnParams,
    coupling: &Coupling,
    spec: &EnsembleSpec,
) -> Result<(McTrace, McTrace)> {
    let mut plus_chunks = Vec::with_capacity(spec.n_chunks() as usize);
    let mut minus_chunks = Vec::with_capacity(spec.n_chunks() as usize);
    for chunk in 0..spec.n_chunks() {
        let (p_sums, m_sums) = accumulate_marginal_chunk(p, coupling, spec, chunk)?;
        plus_chunks.push(p_sums);
        minus_chunks.push(m_sums);
    }
    Ok((
        trace_from_chunks(spec, &plus_chunks)?,
        trace_from_chunks(spec, &minus_chunks)?,
    ))
}
