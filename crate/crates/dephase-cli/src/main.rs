//! `dephase`: compute and cross-check dephasing dynamics of a two-level
//! system under nonstationary Ornstein-Uhlenbeck or random telegraph noise.

// Validation uses negated comparisons like `!(x > 0.0)` so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod error;
mod figures;
mod output;
mod report;
mod trace;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dephase_core::analytic::steady_values;

use config::{resolve, CaseArgs, GridArgs, McArgs, Solver};
use error::CliError;
use report::{build_report, Incompatibility};

#[derive(Parser)]
#[command(
    name = "dephase",
    version,
    about = "Dephasing of a two-level system under nonstationary OU or telegraph noise"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one solver and write the trace as CSV.
    Run {
        #[command(flatten)]
        case: CaseArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        mc: McArgs,
        /// Solver: analytic, mc, sle, tcl or volterra.
        #[arg(long)]
        solver: Option<String>,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run several solvers on one case and grid, and judge their agreement.
    Compare {
        #[command(flatten)]
        case: CaseArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        mc: McArgs,
        /// Comma-separated solver list.
        #[arg(long, value_delimiter = ',', required = true)]
        solvers: Vec<String>,
        /// Absolute tolerance for deterministic solver pairs.
        #[arg(long, default_value_t = 1e-3)]
        tolerance: f64,
        /// Report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the plot-ready CSV data behind a figure panel.
    Figure {
        /// Preset name, fig1a through fig7b.
        #[arg(long)]
        preset: String,
        /// Output directory for the curve files.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Print the long-time decoherence rate and frequency shift as JSON.
    Steady {
        #[command(flatten)]
        case: CaseArgs,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn write_output(out: Option<&PathBuf>, body: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            std::io::stdout().write_all(body)?;
            Ok(())
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Run {
            case,
            grid,
            mc,
            solver,
            out,
        } => {
            let r = resolve(&case, Some(&grid), Some(&mc), solver.as_deref())?;
            let trace = trace::compute(&r.case, &r.grid, &r.mc, r.solver)?;
            let mut body = Vec::new();
            output::write_csv(&mut body, &r.case, &r.grid, &r.mc, &trace)?;
            write_output(out.as_ref(), &body)
        }
        Cmd::Compare {
            case,
            grid,
            mc,
            solvers,
            tolerance,
            out,
        } => {
            if solvers.is_empty() {
                return Err(CliError::usage("--solvers needs at least one solver"));
            }
            let r = resolve(&case, Some(&grid), Some(&mc), None)?;
            let mut traces = Vec::new();
            let mut incompatible = Vec::new();
            for name in &solvers {
                let solver: Solver = name.parse()?;
                match trace::check_compatibility(&r.case, solver) {
                    Ok(()) => traces.push(trace::compute(&r.case, &r.grid, &r.mc, solver)?),
                    Err(err) => incompatible.push(Incompatibility {
                        solver: solver.to_string(),
                        reason: err.to_string(),
                    }),
                }
            }
            let report = build_report(r.case.describe(), &traces, incompatible, tolerance);
            let pass = report.pass;
            let mut body = serde_json::to_vec_pretty(&report)
                .map_err(|e| CliError::Io(e.to_string()))?;
            body.push(b'\n');
            write_output(out.as_ref(), &body)?;
            if pass {
                Ok(())
            } else {
                Err(CliError::ComparisonFailed(
                    "solver traces disagree beyond tolerance; see report".into(),
                ))
            }
        }
        Cmd::Figure { preset, out_dir } => {
            let files = figures::emit(&preset, &out_dir)?;
            let mut msg = String::new();
            for f in files {
                msg.push_str(&f);
                msg.push('\n');
            }
            print!("{msg}");
            Ok(())
        }
        Cmd::Steady { case, out } => {
            let r = resolve(&case, None, None, None)?;
            let sv = steady_values(&r.case.model, &r.case.coupling);
            let json = serde_json::json!({
                "gamma_steady": sv.gamma_steady,
                "shift_steady": sv.shift_steady,
            });
            let mut body = serde_json::to_vec_pretty(&json)
                .map_err(|e| CliError::Io(e.to_string()))?;
            body.push(b'\n');
            write_output(out.as_ref(), &body)
        }
    }
}
