//! Invariant audits, manufactured-solution convergence and parameter sweeps.

pub mod audit;
pub mod mms;
pub mod sweep;

pub use audit::{audit_run, energy_rhs, AuditRow, InvariantCheck, InvariantReport, Tolerances};
pub use mms::{manufactured_convergence, MmsCase};
pub use sweep::{regularization_sweep, truncation_sweep, FAR_FIELD_CELLS};

use crate::config::SimConfig;
use crate::error::SimError;
use crate::grid::Grid;
use crate::sim::{self, Problem, RunOutput};

/// One level of a sweep. Differences on level `i` are taken against level
/// `i - 1` (or against the reference run for truncation sweeps); `NaN`
/// marks a quantity that does not apply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub c_l2: f64,
    pub p_l2: f64,
    pub grad_p_l2: f64,
    pub max_speed: f64,
    /// Observed order between this level and the previous one.
    pub order: f64,
}

impl SweepRow {
    pub fn new(value: f64) -> Self {
        SweepRow { value, c_l2: f64::NAN, p_l2: f64::NAN, grad_p_l2: f64::NAN, max_speed: f64::NAN, order: f64::NAN }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub parameter: &'static str,
    pub rows: Vec<SweepRow>,
    /// Final concentration of every level.
    pub snapshots: Vec<Vec<f64>>,
    /// Per level: bitwise equal to the reference run (truncation sweeps only).
    pub identical: Vec<bool>,
    pub passed: bool,
    pub summary: String,
}

impl SweepReport {
    pub fn values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.value).collect()
    }

    /// Orders that are defined (levels two and up).
    pub fn orders(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.order).filter(|o| !o.is_nan()).collect()
    }
}

/// `sqrt(sum vol v^2)`
pub fn l2_norm(grid: &Grid, v: &[f64]) -> f64 {
    (v.iter().map(|x| x * x).sum::<f64>() * grid.cell_volume()).sqrt()
}

pub fn l2_diff(grid: &Grid, a: &[f64], b: &[f64]) -> f64 {
    (a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() * grid.cell_volume()).sqrt()
}

/// `log(e_prev / e) / log(ratio)`; `NaN` unless both errors are positive.
pub fn observed_order(e_prev: f64, e: f64, ratio: f64) -> f64 {
    if e_prev > 0.0 && e > 0.0 {
        (e_prev / e).ln() / ratio.ln()
    } else {
        f64::NAN
    }
}

/// Builds and runs a configuration to its final time.
pub fn run_config(cfg: &SimConfig) -> Result<(Problem, Vec<f64>, RunOutput), SimError> {
    let (problem, c0) = cfg.build()?;
    let out = sim::run(&problem, c0.clone(), cfg.time.final_time, cfg.time.dt, &mut |_, _| {})?;
    Ok((problem, c0, out))
}
