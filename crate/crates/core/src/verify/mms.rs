//! Manufactured-solution convergence studies.

use super::{l2_diff, observed_order, SweepReport, SweepRow};
use crate::error::SimError;
use crate::fields::{CoefficientFields, DispersionModel, FluidModel};
use crate::grid::Grid;
use crate::par;
use crate::pressure;
use crate::sim::{ExtraForcing, Problem, SimState, SolverSettings};
use crate::transport;
use crate::wells::WellSet;
use std::f64::consts::PI;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmsCase {
    /// `p = cos(pi x) cos(pi y)`, unit scalar permeability, levels are cells per side.
    Pressure,
    /// Stationary `c` in the cellular flow, levels are cells per side.
    Transport,
    /// Implicit Euler on a fixed 32 x 32 grid, levels are step counts.
    Temporal,
}

impl MmsCase {
    pub const ALL: [MmsCase; 3] = [MmsCase::Pressure, MmsCase::Transport, MmsCase::Temporal];

    pub fn name(self) -> &'static str {
        match self {
            MmsCase::Pressure => "pressure",
            MmsCase::Transport => "transport",
            MmsCase::Temporal => "temporal",
        }
    }

    pub fn default_levels(self) -> Vec<usize> {
        match self {
            MmsCase::Pressure => vec![8, 16, 32],
            MmsCase::Transport => vec![16, 32, 64],
            MmsCase::Temporal => vec![8, 16, 32, 64],
        }
    }

    /// Minimum acceptable observed order.
    pub fn required_order(self) -> f64 {
        match self {
            MmsCase::Pressure => 1.9,
            MmsCase::Transport | MmsCase::Temporal => 0.9,
        }
    }
}

impl FromStr for MmsCase {
    type Err = SimError;
    fn from_str(s: &str) -> Result<Self, SimError> {
        MmsCase::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| SimError::Config(format!("unknown manufactured case '{s}'")))
    }
}

const DM: f64 = 0.01;
const TRANSPORT_DT: f64 = 0.5;
const TEMPORAL_N: usize = 32;
const TEMPORAL_T: f64 = 0.25;

fn isotropic(dm: f64) -> DispersionModel {
    // dl = dt = 0 keeps D = Phi dm I independent of the velocity
    DispersionModel { dm, dl: 0.0, dt: 0.0, trunc_k: None }
}

fn unit_problem(n: usize) -> Result<Problem, SimError> {
    let grid = Grid::new(n, n, 1.0, 1.0)?;
    let coeffs = CoefficientFields::uniform(&grid, 1.0, 1.0)?;
    let fluid = FluidModel::new(1.0, 1.0, 1.0, 1.0, [0.0, 0.0])?;
    let settings = SolverSettings { pressure_tol: 1e-13, transport_tol: 1e-13, max_iter: 20_000, ..SolverSettings::default() };
    Problem::new(grid, coeffs, fluid, isotropic(DM), WellSet::none(), settings)
}

fn cellular_psi(x: f64, y: f64) -> f64 {
    (PI * x).sin() * (PI * y).sin() / PI
}

fn exact_c(x: f64, y: f64) -> f64 {
    0.5 + 0.25 * (PI * x).cos() * (PI * y).cos()
}

/// `-div(D grad c) + u . grad c` for the stationary field in the cellular flow.
fn transport_source(x: f64, y: f64) -> f64 {
    let (sx, cx, sy, cy) = ((PI * x).sin(), (PI * x).cos(), (PI * y).sin(), (PI * y).cos());
    let u = [sx * cy, -cx * sy];
    let grad = [-0.25 * PI * sx * cy, -0.25 * PI * cx * sy];
    DM * 2.0 * PI * PI * 0.25 * cx * cy + u[0] * grad[0] + u[1] * grad[1]
}

fn pressure_error(n: usize) -> Result<f64, SimError> {
    let problem = unit_problem(n)?;
    let g = &problem.grid;
    let exact: Vec<f64> = (0..g.n_cells()).map(|i| {
        let [x, y] = g.center(i);
        (PI * x).cos() * (PI * y).cos()
    }).collect();
    let f: Vec<f64> = exact.iter().map(|p| 2.0 * PI * PI * p).collect();
    let c = vec![0.0; g.n_cells()];
    let sys = pressure::assemble_pressure(g, &problem.coeffs, &problem.fluid, &c, &f);
    let (p, _) = pressure::solve_pressure(&sys, 1e-13, 20_000).map_err(|source| SimError::Solver { stage: "pressure", step: 0, source })?;
    let shift = p.iter().zip(&exact).map(|(a, b)| a - b).sum::<f64>() / g.n_cells() as f64;
    let shifted: Vec<f64> = p.iter().map(|v| v - shift).collect();
    Ok(l2_diff(g, &shifted, &exact))
}

fn cellular_state(problem: &Problem, c: Vec<f64>) -> SimState {
    let g = &problem.grid;
    let flux = transport::flux_from_stream_function(g, cellular_psi);
    let u_cell = pressure::cell_velocity(g, &flux);
    SimState { step: 0, time: 0.0, c, p: vec![0.0; g.n_cells()], flux, u_cell, acc: Default::default() }
}

fn transport_error(n: usize) -> Result<f64, SimError> {
    let problem = unit_problem(n)?;
    let g = &problem.grid;
    let exact: Vec<f64> = (0..g.n_cells()).map(|i| {
        let [x, y] = g.center(i);
        exact_c(x, y)
    }).collect();
    let f: Vec<f64> = (0..g.n_cells()).map(|i| {
        let [x, y] = g.center(i);
        transport_source(x, y)
    }).collect();
    let state = cellular_state(&problem, exact.clone());
    let forcing = ExtraForcing { source: Some(&f), flux: Some(&state.flux) };
    let (next, _) = problem.step_with_source(&state, TRANSPORT_DT, Some(&forcing))?;
    Ok(l2_diff(g, &next.c, &exact))
}

fn temporal_solution(steps: usize) -> Result<Vec<f64>, SimError> {
    let problem = unit_problem(TEMPORAL_N)?;
    let g = &problem.grid;
    let c0: Vec<f64> = (0..g.n_cells()).map(|i| {
        let [x, y] = g.center(i);
        exact_c(x, y + 0.25)
    }).collect();
    let mut state = cellular_state(&problem, c0);
    let flux = state.flux.clone();
    let forcing = ExtraForcing { source: None, flux: Some(&flux) };
    let dt = TEMPORAL_T / steps as f64;
    for _ in 0..steps {
        state = problem.step_with_source(&state, dt, Some(&forcing))?.0;
    }
    Ok(state.c)
}

/// Runs `case` on every level (concurrently, up to `jobs` at a time) and
/// reports errors and observed orders.
///
/// For the spatial cases `c_l2`/`p_l2` hold the error against the exact
/// solution; for the temporal case `c_l2` holds the difference to the
/// previous level (Richardson).
pub fn manufactured_convergence(case: MmsCase, levels: &[usize], jobs: usize) -> Result<SweepReport, SimError> {
    if levels.len() < 3 {
        return Err(SimError::Config(format!("{} study needs at least 3 levels", case.name())));
    }
    if levels.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(SimError::Config("levels must double".into()));
    }
    let outcome = match case {
        MmsCase::Pressure => {
            let errs = par::run_jobs(levels.to_vec(), jobs, pressure_error).into_iter().collect::<Result<Vec<_>, _>>()?;
            errs.into_iter().map(|e| (e, Vec::new())).collect::<Vec<_>>()
        }
        MmsCase::Transport => {
            let errs = par::run_jobs(levels.to_vec(), jobs, transport_error).into_iter().collect::<Result<Vec<_>, _>>()?;
            errs.into_iter().map(|e| (e, Vec::new())).collect()
        }
        MmsCase::Temporal => {
            let sols = par::run_jobs(levels.to_vec(), jobs, temporal_solution).into_iter().collect::<Result<Vec<_>, _>>()?;
            let g = Grid::new(TEMPORAL_N, TEMPORAL_N, 1.0, 1.0)?;
            let mut out = vec![(f64::NAN, sols[0].clone())];
            for w in sols.windows(2) {
                out.push((l2_diff(&g, &w[1], &w[0]), w[1].clone()));
            }
            out
        }
    };

    let mut rows = Vec::with_capacity(levels.len());
    let mut snapshots = Vec::with_capacity(levels.len());
    for (k, ((err, snap), &level)) in outcome.into_iter().zip(levels).enumerate() {
        let value = match case {
            MmsCase::Temporal => TEMPORAL_T / level as f64,
            _ => 1.0 / level as f64,
        };
        let mut row = SweepRow::new(value);
        match case {
            MmsCase::Pressure => row.p_l2 = err,
            _ => row.c_l2 = err,
        }
        if k > 0 {
            let prev: &SweepRow = &rows[k - 1];
            let e_prev = if case == MmsCase::Pressure { prev.p_l2 } else { prev.c_l2 };
            row.order = observed_order(e_prev, err, 2.0);
        }
        rows.push(row);
        snapshots.push(snap);
    }
    let orders: Vec<f64> = rows.iter().map(|r| r.order).filter(|o| !o.is_nan()).collect();
    let min_order = orders.iter().copied().fold(f64::INFINITY, f64::min);
    let passed = !orders.is_empty() && orders.len() == rows.len() - 1 - usize::from(case == MmsCase::Temporal) && min_order >= case.required_order();
    let summary = format!("{} orders {:?}, required >= {}", case.name(), orders, case.required_order());
    Ok(SweepReport { parameter: if case == MmsCase::Temporal { "dt" } else { "h" }, rows, snapshots, identical: Vec::new(), passed, summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manufactured_source_matches_finite_differences() {
        let h = 1e-5;
        let (x, y) = (0.3, 0.7);
        let c = |x: f64, y: f64| exact_c(x, y);
        let lap = (c(x + h, y) + c(x - h, y) + c(x, y + h) + c(x, y - h) - 4.0 * c(x, y)) / (h * h);
        let u = [
            (cellular_psi(x, y + h) - cellular_psi(x, y - h)) / (2.0 * h),
            -(cellular_psi(x + h, y) - cellular_psi(x - h, y)) / (2.0 * h),
        ];
        let grad = [(c(x + h, y) - c(x - h, y)) / (2.0 * h), (c(x, y + h) - c(x, y - h)) / (2.0 * h)];
        let fd = -DM * lap + u[0] * grad[0] + u[1] * grad[1];
        assert!((fd - transport_source(x, y)).abs() < 1e-5, "{fd} vs {}", transport_source(x, y));
    }

    #[test]
    fn case_names_parse() {
        for c in MmsCase::ALL {
            assert_eq!(c.name().parse::<MmsCase>().unwrap(), c);
        }
        assert!("nope".parse::<MmsCase>().is_err());
    }

    #[test]
    fn too_few_levels_rejected() {
        assert!(manufactured_convergence(MmsCase::Pressure, &[8, 16], 1).is_err());
        assert!(manufactured_convergence(MmsCase::Pressure, &[8, 12, 16], 1).is_err());
    }

    #[test]
    fn pressure_errors_shrink() {
        let r = manufactured_convergence(MmsCase::Pressure, &[4, 8, 16], 2).unwrap();
        assert!(r.rows.windows(2).all(|w| w[1].p_l2 < w[0].p_l2));
    }
}
