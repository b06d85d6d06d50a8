//! CSV serialization of solver traces.  The header echoes the full run
//! configuration as `# key = value` comment lines, so any output file can be
//! fed back through `--config` to reproduce itself.

use std::io::Write;

use crate::config::{Case, McSettings, Solver, TimeGrid};
use crate::trace::SolverTrace;

pub const CSV_HEADER: &str = "t,re_F,im_F,abs_F,gamma,shift,diverged,se_re,se_im";

pub fn write_csv<W: Write>(
    out: &mut W,
    case: &Case,
    grid: &TimeGrid,
    mc: &McSettings,
    trace: &SolverTrace,
) -> std::io::Result<()> {
    for line in case.describe().lines() {
        writeln!(out, "# {line}")?;
    }
    writeln!(out, "# solver = {}", trace.solver)?;
    writeln!(out, "# t_max = {}", grid.t_max)?;
    writeln!(out, "# dt = {}", grid.dt)?;
    if trace.solver == Solver::Mc {
        writeln!(out, "# n_traj = {}", mc.n_traj)?;
        writeln!(out, "# seed = {}", mc.seed)?;
        writeln!(out, "# substeps = {}", mc.substeps)?;
    }
    writeln!(out, "{CSV_HEADER}")?;
    for i in 0..trace.times.len() {
        let (se_re, se_im) = match &trace.se {
            Some((re, im)) => (re[i].to_string(), im[i].to_string()),
            None => (String::new(), String::new()),
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            trace.times[i],
            trace.f[i].re,
            trace.f[i].im,
            trace.f[i].norm(),
            trace.gamma[i],
            trace.shift[i],
            trace.diverged[i],
            se_re,
            se_im,
        )?;
    }
    Ok(())
}
