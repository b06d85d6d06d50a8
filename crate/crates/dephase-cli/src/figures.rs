//! Figure presets: parameter sweeps that regenerate the data behind each
//! panel, one plot-ready CSV per curve.
//!
//! OUN presets use units of `1/gamma` (gamma = 1), RTN presets units of
//! `1/lambda` (lambda = 1).  Sweeps run over {0, 0.3, 0.6, 0.9} for the
//! nonstationarity parameter, extended with the signs or endpoint values a
//! panel distinguishes.

use std::path::Path;

use dephase_core::noise::{Coupling, NoiseModel, OuParams, RtnParams};

use crate::config::{Case, McSettings, Solver, TimeGrid};
use crate::error::CliError;
use crate::output::write_csv;
use crate::trace;

pub const PRESETS: &[&str] = &[
    "fig1a", "fig1b", "fig1c", "fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig4a", "fig4b",
    "fig5a", "fig5b", "fig6a", "fig6b", "fig7a", "fig7b",
];

const SWEEP: [f64; 4] = [0.0, 0.3, 0.6, 0.9];

struct Curve {
    label: String,
    case: Case,
    grid: TimeGrid,
}

fn ou_curve(label: String, sigma: f64, b: f64, chi: f64, c: f64, k: u8, t_max: f64) -> Curve {
    Curve {
        label,
        case: Case {
            model: NoiseModel::Ou(OuParams::new(1.0, sigma, b, chi).expect("preset parameters")),
            coupling: Coupling::new(c, k).expect("preset parameters"),
        },
        grid: TimeGrid { t_max, dt: 0.01 },
    }
}

fn rtn_curve(label: String, a: f64, c: f64, t_max: f64) -> Curve {
    Curve {
        label,
        case: Case {
            model: NoiseModel::Rtn(RtnParams::new(1.0, 1.0, a).expect("preset parameters")),
            coupling: Coupling::linear(c).expect("preset parameters"),
        },
        grid: TimeGrid { t_max, dt: 0.01 },
    }
}

fn signed(values: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for &v in values {
        out.push(v);
        if v != 0.0 {
            out.push(-v);
        }
    }
    out
}

fn curves(preset: &str) -> Result<Vec<Curve>, CliError> {
    let name = |param: &str, v: f64| {
        format!("{}{}{}", param, if v < 0.0 { "m" } else { "p" }, v.abs())
    };
    Ok(match preset {
        // Linear OUN sweep in b, both signs (solid/dashed pairs).
        "fig1a" | "fig1b" | "fig1c" => signed(&SWEEP)
            .into_iter()
            .map(|b| ou_curve(name("b", b), 2.0, b, 1.0, 1.0, 1, 5.0))
            .collect(),
        // Quadratic OUN sweep in b.
        "fig2a" | "fig2b" | "fig2c" => SWEEP
            .into_iter()
            .map(|b| ou_curve(name("b", b), 2.0, b, 1.0, 1.0, 2, 5.0))
            .collect(),
        // Linear vs quadratic, weak noise amplitude.
        "fig3a" | "fig3b" => SWEEP
            .into_iter()
            .flat_map(|b| {
                [1u8, 2u8]
                    .into_iter()
                    .map(move |k| (b, k))
            })
            .map(|(b, k)| ou_curve(format!("k{k}_{}", name("b", b)), 0.7, b, 1.0, 1.0, k, 5.0))
            .collect(),
        // Linear vs quadratic, stationary noise, strong amplitude.
        "fig4a" | "fig4b" => [1u8, 2u8]
            .into_iter()
            .map(|k| ou_curve(format!("k{k}"), 2.0, 0.0, 0.0, 1.0, k, 5.0))
            .collect(),
        // RTN sweeps in a; panel a weak (|c|/r = 0.8), panel b strong
        // (|c|/r = 3), sweep extended with the monotone endpoint a = 1.
        "fig5a" | "fig6a" => rtn_sweep(&[0.0, 0.3, 0.6, 0.9, 1.0], 0.8),
        "fig5b" | "fig6b" => rtn_sweep(&[0.0, 0.3, 0.6, 0.9, 1.0], 3.0),
        // The shift panels distinguish the sign of a c.
        "fig7a" => rtn_sweep(&signed(&[0.3, 0.6, 0.9, 1.0]), 0.8),
        "fig7b" => rtn_sweep(&signed(&[0.3, 0.6, 0.9, 1.0]), 3.0),
        other => {
            return Err(CliError::usage(format!(
                "unknown preset '{other}'; valid presets: {}",
                PRESETS.join(", ")
            )))
        }
    })
}

fn rtn_sweep(a_values: &[f64], c: f64) -> Vec<Curve> {
    a_values
        .iter()
        .map(|&a| {
            let label = format!("a{}{}", if a < 0.0 { "m" } else { "p" }, a.abs());
            rtn_curve(label, a, c, 10.0)
        })
        .collect()
}

/// Writes one CSV per curve of the preset into `out_dir`.  Returns the file
/// names written.
pub fn emit(preset: &str, out_dir: &Path) -> Result<Vec<String>, CliError> {
    let curves = curves(preset)?;
    std::fs::create_dir_all(out_dir)?;
    let mc = McSettings {
        n_traj: 100_000,
        seed: 0,
        substeps: 16,
    };
    let mut written = Vec::new();
    for curve in curves {
        let trace = trace::compute(&curve.case, &curve.grid, &mc, Solver::Analytic)?;
        let file = format!("{preset}_{}.csv", curve.label);
        let path = out_dir.join(&file);
        let mut out = std::io::BufWriter::new(std::fs::File::create(&path)?);
        use std::io::Write;
        writeln!(out, "# preset = {preset}")?;
        write_csv(&mut out, &curve.case, &curve.grid, &mc, &trace)?;
        written.push(file);
    }
    Ok(written)
}
