//! Pairwise solver comparison and the machine-readable JSON report.

use serde::Serialize;

use crate::trace::SolverTrace;

#[derive(Debug, Serialize)]
pub struct PairReport {
    pub solvers: [String; 2],
    pub max_abs_dev: f64,
    pub rms_dev: f64,
    /// Absolute tolerance for deterministic pairs; `null` when the pair is
    /// judged by the statistical band instead.
    pub tolerance: Option<f64>,
    pub criterion: String,
    /// Fraction of grid points inside the 3 standard-error band, for pairs
    /// involving the Monte Carlo route.
    pub fraction_within_band: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct Incompatibility {
    pub solver: String,
    pub reason: String,
}

#[derive(Debug, Serialize)]
pub struct ComparisonReport {
    pub case: String,
    pub solvers: Vec<String>,
    pub tolerance: f64,
    pub pairs: Vec<PairReport>,
    pub incompatible: Vec<Incompatibility>,
    pub max_abs_dev: f64,
    pub rms_dev: f64,
    pub pass: bool,
}

/// Deviation statistics of two traces on the shared grid.
fn deviations(a: &SolverTrace, b: &SolverTrace) -> (f64, f64) {
    let mut max_dev = 0.0f64;
    let mut sq = 0.0;
    for i in 0..a.f.len() {
        let d = (a.f[i] - b.f[i]).norm();
        max_dev = max_dev.max(d);
        sq += d * d;
    }
    (max_dev, (sq / a.f.len() as f64).sqrt())
}

/// Compares one pair.  Deterministic pairs are judged by `max_abs_dev <
/// tolerance`; pairs involving Monte Carlo by the fraction of points whose
/// componentwise deviation sits inside 3 combined standard errors (pass at
/// 95%).
pub fn compare_pair(a: &SolverTrace, b: &SolverTrace, tolerance: f64) -> PairReport {
    let (max_abs_dev, rms_dev) = deviations(a, b);
    let statistical = a.se.is_some() || b.se.is_some();
    if !statistical {
        return PairReport {
            solvers: [a.solver.to_string(), b.solver.to_string()],
            max_abs_dev,
            rms_dev,
            tolerance: Some(tolerance),
            criterion: "max_abs_dev < tolerance".into(),
            fraction_within_band: None,
            pass: max_abs_dev < tolerance,
        };
    }
    let zero = (vec![0.0; a.f.len()], vec![0.0; a.f.len()]);
    let (ar, ai) = a.se.as_ref().unwrap_or(&zero);
    let (br, bi) = b.se.as_ref().unwrap_or(&zero);
    let mut within = 0usize;
    for i in 0..a.f.len() {
        let d = a.f[i] - b.f[i];
        // A small absolute floor keeps exactly reproduced points (se = 0,
        // deviation at rounding level) inside the band.
        let band_re = 3.0 * (ar[i] + br[i]).max(1e-12);
        let band_im = 3.0 * (ai[i] + bi[i]).max(1e-12);
        if d.re.abs() <= band_re && d.im.abs() <= band_im {
            within += 1;
        }
    }
    let fraction = within as f64 / a.f.len() as f64;
    PairReport {
        solvers: [a.solver.to_string(), b.solver.to_string()],
        max_abs_dev,
        rms_dev,
        tolerance: None,
        criterion: "within 3 se at >= 95% of points".into(),
        fraction_within_band: Some(fraction),
        pass: fraction >= 0.95,
    }
}

pub fn build_report(
    case: String,
    traces: &[SolverTrace],
    incompatible: Vec<Incompatibility>,
    tolerance: f64,
) -> ComparisonReport {
    let mut pairs = Vec::new();
    for i in 0..traces.len() {
        for j in i + 1..traces.len() {
            pairs.push(compare_pair(&traces[i], &traces[j], tolerance));
        }
    }
    let max_abs_dev = pairs.iter().map(|p| p.max_abs_dev).fold(0.0, f64::max);
    let rms_dev = pairs.iter().map(|p| p.rms_dev).fold(0.0, f64::max);
    let pass = pairs.iter().all(|p| p.pass) && incompatible.is_empty();
    let mut solvers: Vec<String> = traces.iter().map(|t| t.solver.to_string()).collect();
    solvers.extend(incompatible.iter().map(|i| i.solver.clone()));
    ComparisonReport {
        case,
        solvers,
        tolerance,
        pairs,
        incompatible,
        max_abs_dev,
        rms_dev,
        pass,
    }
}
