//! Case/grid/ensemble configuration: command-line flags merged over an
//! optional `key = value` config file (flags win).

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dephase_core::noise::{Coupling, NoiseModel, OuParams, RtnParams};

use crate::error::CliError;

#[derive(Debug, Clone, clap::Args)]
pub struct CaseArgs {
    /// Plain-text config file with `key = value` lines; flags override it.
    /// Lines may carry a leading `#`, so a previous run's CSV header can be
    /// reused as a config.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Noise model: oun or rtn.
    #[arg(long)]
    pub noise: Option<String>,
    /// OUN relaxation rate.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// OUN stationary standard deviation.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// OUN nonstationarity parameter, |b| < 1.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// OUN initial-mean scale.
    #[arg(long, allow_hyphen_values = true)]
    pub chi: Option<f64>,
    /// RTN switching rate.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// RTN amplitude.
    #[arg(long)]
    pub nu: Option<f64>,
    /// RTN nonstationarity parameter, |a| <= 1.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Coupling strength, nonzero.
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// Coupling exponent, 1 or 2.
    #[arg(long)]
    pub k: Option<u8>,
}

#[derive(Debug, Clone, clap::Args)]
pub struct GridArgs {
    /// Time horizon.
    #[arg(long = "t-max")]
    pub t_max: Option<f64>,
    /// Time step of the output grid (and of the grid solvers).
    #[arg(long)]
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, clap::Args)]
pub struct McArgs {
    /// Monte Carlo trajectory count.
    #[arg(long = "n-traj")]
    pub n_traj: Option<u64>,
    /// Monte Carlo seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// OUN integration substeps per output step.
    #[arg(long)]
    pub substeps: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    Analytic,
    Mc,
    Sle,
    Tcl,
    Volterra,
}

impl FromStr for Solver {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "analytic" => Ok(Self::Analytic),
            "mc" => Ok(Self::Mc),
            "sle" => Ok(Self::Sle),
            "tcl" => Ok(Self::Tcl),
            "volterra" => Ok(Self::Volterra),
            other => Err(CliError::usage(format!(
                "unknown solver '{other}' (expected analytic, mc, sle, tcl or volterra)"
            ))),
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Analytic => "analytic",
            Self::Mc => "mc",
            Self::Sle => "sle",
            Self::Tcl => "tcl",
            Self::Volterra => "volterra",
        })
    }
}

/// Fully resolved case: noise model plus coupling.
#[derive(Debug, Clone)]
pub struct Case {
    pub model: NoiseModel,
    pub coupling: Coupling,
}

impl Case {
    /// One-line description echoed into outputs and reports.
    pub fn describe(&self) -> String {
        let mut s = String::new();
        match &self.model {
            NoiseModel::Ou(p) => {
                s.push_str(&format!(
                    "noise = oun\ngamma = {}\nsigma = {}\nb = {}\nchi = {}\n",
                    p.gamma(),
                    p.sigma(),
                    p.b(),
                    p.chi()
                ));
            }
            NoiseModel::Rtn(p) => {
                s.push_str(&format!(
                    "noise = rtn\nlambda = {}\nnu = {}\na = {}\n",
                    p.lambda(),
                    p.nu(),
                    p.a()
                ));
            }
        }
        s.push_str(&format!("c = {}\nk = {}\n", self.coupling.c(), self.coupling.k()));
        s
    }
}

/// Resolved time grid shared by every solver of a run.
#[derive(Debug, Clone, Copy)]
pub struct TimeGrid {
    pub t_max: f64,
    pub dt: f64,
}

impl TimeGrid {
    /// The common output grid: `n = ceil(t_max / dt)` uniform steps landing
    /// exactly on `t_max`, matching the internal grids of the solvers.
    pub fn times(&self) -> Vec<f64> {
        let n = ((self.t_max / self.dt).ceil() as usize).max(1);
        (0..=n).map(|i| self.t_max * i as f64 / n as f64).collect()
    }
}

/// Resolved Monte Carlo settings.
#[derive(Debug, Clone, Copy)]
pub struct McSettings {
    pub n_traj: u64,
    pub seed: u64,
    pub substeps: u32,
}

fn parse_config_file(path: &Path) -> Result<HashMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = HashMap::new();
    for line in text.lines() {
        let line = line.trim().trim_start_matches('#').trim();
        if let Some((key, value)) = line.split_once('=') {
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
    }
    Ok(map)
}

fn merged<T: FromStr>(
    flag: Option<T>,
    map: &HashMap<String, String>,
    key: &str,
) -> Result<Option<T>, CliError> {
    if flag.is_some() {
        return Ok(flag);
    }
    match map.get(key) {
        None => Ok(None),
        Some(raw) => raw
            .parse::<T>()
            .map(Some)
            .map_err(|_| CliError::usage(format!("config key '{key}' has invalid value '{raw}'"))),
    }
}

fn required<T>(value: Option<T>, key: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::usage(format!("missing required parameter '{key}'")))
}

pub struct Resolved {
    pub case: Case,
    pub grid: TimeGrid,
    pub mc: McSettings,
    pub solver: Solver,
}

/// Merges flags over the config file and validates everything through the
/// library parameter types.
pub fn resolve(
    case: &CaseArgs,
    grid: Option<&GridArgs>,
    mc: Option<&McArgs>,
    solver_flag: Option<&str>,
) -> Result<Resolved, CliError> {
    let map = match &case.config {
        Some(path) => parse_config_file(path)?,
        None => HashMap::new(),
    };
    let noise = required(merged(case.noise.clone(), &map, "noise")?, "noise")?;
    let c = required(merged(case.c, &map, "c")?, "c")?;
    let k = merged(case.k, &map, "k")?.unwrap_or(1);
    let coupling = Coupling::new(c, k).map_err(CliError::from_core)?;
    let model = match noise.as_str() {
        "oun" => {
            let gamma = required(merged(case.gamma, &map, "gamma")?, "gamma")?;
            let sigma = required(merged(case.sigma, &map, "sigma")?, "sigma")?;
            let b = merged(case.b, &map, "b")?.unwrap_or(0.0);
            let chi = merged(case.chi, &map, "chi")?.unwrap_or(0.0);
            NoiseModel::Ou(OuParams::new(gamma, sigma, b, chi).map_err(CliError::from_core)?)
        }
        "rtn" => {
            let lambda = required(merged(case.lambda, &map, "lambda")?, "lambda")?;
            let nu = required(merged(case.nu, &map, "nu")?, "nu")?;
            let a = merged(case.a, &map, "a")?.unwrap_or(0.0);
            NoiseModel::Rtn(RtnParams::new(lambda, nu, a).map_err(CliError::from_core)?)
        }
        other => {
            return Err(CliError::usage(format!(
                "unknown noise model '{other}' (expected oun or rtn)"
            )))
        }
    };
    let (t_max_flag, dt_flag) = match grid {
        Some(g) => (g.t_max, g.dt),
        None => (None, None),
    };
    let t_max = merged(t_max_flag, &map, "t_max")?.unwrap_or(5.0);
    let dt = merged(dt_flag, &map, "dt")?.unwrap_or(0.01);
    if !(t_max > 0.0) || !(dt > 0.0) || dt > t_max {
        return Err(CliError::usage(
            "time grid needs 0 < dt <= t_max with both finite",
        ));
    }
    let (n_traj_flag, seed_flag, substeps_flag) = match mc {
        Some(m) => (m.n_traj, m.seed, m.substeps),
        None => (None, None, None),
    };
    let mc = McSettings {
        n_traj: merged(n_traj_flag, &map, "n_traj")?.unwrap_or(100_000),
        seed: merged(seed_flag, &map, "seed")?.unwrap_or(0),
        substeps: merged(substeps_flag, &map, "substeps")?.unwrap_or(16),
    };
    let solver = match solver_flag {
        Some(s) => s.parse()?,
        None => match map.get("solver") {
            Some(s) => s.parse()?,
            None => Solver::Analytic,
        },
    };
    Ok(Resolved {
        case: Case { model, coupling },
        grid: TimeGrid { t_max, dt },
        mc,
        solver,
    })
}
