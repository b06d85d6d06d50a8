//! Uniform solver interface: every route produces the same trace shape on
//! the shared output grid.

use dephase_core::dynamics::extract_rates;
use dephase_core::mc::{accumulate_chunk, trace_from_chunks, ChunkSums, EnsembleSpec};
use dephase_core::noise::NoiseModel;
use dephase_core::sle::{solve_ou_marginal, solve_rtn_marginal, GridSpec};
use dephase_core::{analytic, Complex};
use rayon::prelude::*;

use crate::config::{Case, McSettings, Solver, TimeGrid};
use crate::error::CliError;

/// One solver's output on the shared time grid.
#[derive(Debug, Clone)]
pub struct SolverTrace {
    pub solver: Solver,
    pub times: Vec<f64>,
    pub f: Vec<Complex>,
    pub gamma: Vec<f64>,
    pub shift: Vec<f64>,
    pub diverged: Vec<bool>,
    /// Standard errors, present only for the Monte Carlo route.
    pub se: Option<(Vec<f64>, Vec<f64>)>,
}

/// Rejects solver/case combinations the closed equations do not cover.
pub fn check_compatibility(case: &Case, solver: Solver) -> Result<(), CliError> {
    let ok = match solver {
        Solver::Tcl => matches!(case.model, NoiseModel::Ou(_)) && case.coupling.k() == 1,
        Solver::Volterra => matches!(case.model, NoiseModel::Rtn(_)) && case.coupling.k() == 1,
        _ => true,
    };
    if ok {
        Ok(())
    } else {
        Err(CliError::usage(format!(
            "solver '{solver}' requires {}",
            match solver {
                Solver::Tcl => "OUN noise with linear coupling (k = 1)",
                _ => "RTN noise with linear coupling (k = 1)",
            }
        )))
    }
}

pub fn compute(
    case: &Case,
    grid: &TimeGrid,
    mc: &McSettings,
    solver: Solver,
) -> Result<SolverTrace, CliError> {
    check_compatibility(case, solver)?;
    match solver {
        Solver::Analytic => analytic_trace(case, grid),
        Solver::Mc => mc_trace(case, grid, mc),
        Solver::Sle => sle_trace(case, grid),
        Solver::Tcl => {
            let NoiseModel::Ou(p) = &case.model else { unreachable!() };
            let sol = dephase_core::dynamics::tcl2_solve_ou_linear(
                p,
                &case.coupling,
                grid.dt,
                grid.t_max,
            )
            .map_err(CliError::from_core)?;
            from_f_trace(solver, sol.times, sol.f)
        }
        Solver::Volterra => {
            let NoiseModel::Rtn(p) = &case.model else { unreachable!() };
            let sol = dephase_core::dynamics::volterra_solve_rtn_linear(
                p,
                &case.coupling,
                grid.dt,
                grid.t_max,
            )
            .map_err(CliError::from_core)?;
            from_f_trace(solver, sol.times, sol.f)
        }
    }
}

fn analytic_trace(case: &Case, grid: &TimeGrid) -> Result<SolverTrace, CliError> {
    let times = grid.times();
    let n = times.len();
    let mut f = Vec::with_capacity(n);
    let mut gamma = Vec::with_capacity(n);
    let mut shift = Vec::with_capacity(n);
    let mut diverged = Vec::with_capacity(n);
    for &t in &times {
        let r = analytic::evaluate(&case.model, &case.coupling, t);
        f.push(r.f);
        gamma.push(r.gamma);
        shift.push(r.shift);
        diverged.push(r.diverged);
    }
    Ok(SolverTrace {
        solver: Solver::Analytic,
        times,
        f,
        gamma,
        shift,
        diverged,
        se: None,
    })
}

fn mc_trace(case: &Case, grid: &TimeGrid, mc: &McSettings) -> Result<SolverTrace, CliError> {
    let spec = EnsembleSpec::with_substeps(mc.n_traj, mc.seed, grid.times(), mc.substeps)
        .map_err(CliError::from_core)?;
    // Chunks are evaluated in parallel but collected in index order, so the
    // pairwise reduction sees the same operand order at any thread count.
    let chunks: Result<Vec<ChunkSums>, _> = (0..spec.n_chunks())
        .into_par_iter()
        .map(|chunk| accumulate_chunk(&case.model, &case.coupling, &spec, chunk))
        .collect();
    let trace = trace_from_chunks(&spec, &chunks.map_err(CliError::from_core)?)
        .map_err(CliError::from_core)?;
    let rates = extract_rates(trace.times(), trace.f()).map_err(CliError::from_core)?;
    Ok(SolverTrace {
        solver: Solver::Mc,
        times: trace.times().to_vec(),
        f: trace.f().to_vec(),
        gamma: rates.gamma().to_vec(),
        shift: rates.shift().to_vec(),
        diverged: rates.diverged().to_vec(),
        se: Some((trace.se_re().to_vec(), trace.se_im().to_vec())),
    })
}

fn sle_trace(case: &Case, grid: &TimeGrid) -> Result<SolverTrace, CliError> {
    match &case.model {
        NoiseModel::Ou(p) => {
            let gs = GridSpec::new(grid.dt, grid.t_max).map_err(CliError::from_core)?;
            let field = solve_ou_marginal(p, &case.coupling, &gs).map_err(CliError::from_core)?;
            from_f_trace(Solver::Sle, field.times().to_vec(), field.f().to_vec())
        }
        NoiseModel::Rtn(p) => {
            let sol = solve_rtn_marginal(p, &case.coupling, grid.dt, grid.t_max)
                .map_err(CliError::from_core)?;
            from_f_trace(Solver::Sle, sol.times, sol.f)
        }
    }
}

/// Rates for the numerical routes come from finite differences of their own
/// `F` trace, the same post-processing a consumer of the CSV would apply.
fn from_f_trace(solver: Solver, times: Vec<f64>, f: Vec<Complex>) -> Result<SolverTrace, CliError> {
    let rates = extract_rates(&times, &f).map_err(CliError::from_core)?;
    Ok(SolverTrace {
        solver,
        gamma: rates.gamma().to_vec(),
        shift: rates.shift().to_vec(),
        diverged: rates.diverged().to_vec(),
        times,
        f,
        se: None,
    })
}
