//! Sequential pressure/transport coupling and the time loop.

use crate::error::SimError;
use crate::fields::{CoefficientFields, DispersionModel, FluidModel};
use crate::grid::{FaceField, Grid};
use crate::linalg::{self, SolveStats};
use crate::pressure;
use crate::transport::{self, TransportInputs, TransportOptions};
use crate::wells::{RegularizedMeasure, Sources, WellSet};

/// Allowed overshoot outside `[0, 1]` before a step is rejected.
pub const BOUNDS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardSettings {
    pub tol: f64,
    pub max_iter: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundsPolicy {
    /// Reject steps whose concentration leaves `[-1e-10, 1 + 1e-10]`.
    Abort,
    /// Keep the out-of-range values and let the audit report them.
    Record,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub pressure_tol: f64,
    pub transport_tol: f64,
    pub max_iter: usize,
    pub picard: Option<PicardSettings>,
    pub bounds: BoundsPolicy,
    pub transport: TransportOptions,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            pressure_tol: 1e-12,
            transport_tol: 1e-12,
            max_iter: 5000,
            picard: None,
            bounds: BoundsPolicy::Abort,
            transport: TransportOptions::default(),
        }
    }
}

/// Everything needed to advance the coupled system.
#[derive(Debug, Clone)]
pub struct Problem {
    pub grid: Grid,
    pub coeffs: CoefficientFields,
    pub fluid: FluidModel,
    pub dispersion: DispersionModel,
    pub wells: WellSet,
    pub measure: RegularizedMeasure,
    pub solver: SolverSettings,
}

/// Running sums over completed steps.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Accumulators {
    /// `sum dt * sum c_hat q_inj vol`
    pub injected: f64,
    /// `sum dt * sum c q_prod vol`
    pub produced: f64,
    /// `sum dt * (D grad c, grad c)` in two-point form.
    pub dissipation: f64,
    /// `sum dt * sum vol |D^{1/2} grad c|^2`
    pub dhalf: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub step: usize,
    pub time: f64,
    pub c: Vec<f64>,
    pub p: Vec<f64>,
    pub flux: FaceField,
    pub u_cell: Vec<[f64; 2]>,
    pub acc: Accumulators,
}

impl SimState {
    pub fn max_speed(&self) -> f64 {
        self.u_cell.iter().fold(0.0f64, |m, u| m.max(u[0].hypot(u[1])))
    }
}

/// Per-step diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepRecord {
    pub step: usize,
    pub time: f64,
    pub dt: f64,
    /// Extremes of `c^{n+1}` before any clamping.
    pub min_c: f64,
    pub max_c: f64,
    /// Relative mass-balance residual of the step.
    pub mass_residual: f64,
    /// `|sum (q_inj - q_prod) vol|`.
    pub compat_residual: f64,
    pub lambda: f64,
    /// `1/2 ||sqrt(Phi) c||^2 + accumulated dissipation`.
    pub energy_lhs: f64,
    pub dissipation: f64,
    pub dhalf: f64,
    /// `||Phi (c^{n+1} - c^n) / dt||_L2`.
    pub dcdt_l2: f64,
    pub max_speed: f64,
    pub max_flux: f64,
    pub picard_iterations: usize,
    pub pressure_iterations: usize,
    pub transport_iterations: usize,
    pub transport_residual: f64,
}

impl Problem {
    pub fn new(
        grid: Grid,
        coeffs: CoefficientFields,
        fluid: FluidModel,
        dispersion: DispersionModel,
        wells: WellSet,
        solver: SolverSettings,
    ) -> Result<Self, SimError> {
        let measure = wells.regularize(&grid)?;
        Ok(Problem { grid, coeffs, fluid, dispersion, wells, measure, solver })
    }

    pub fn n_cells(&self) -> usize {
        self.grid.n_cells()
    }

    pub fn sources_at(&self, t: f64) -> Result<Sources, SimError> {
        Ok(self.wells.source_fields(&self.measure, &self.grid, t)?)
    }

    /// `1/2 sum Phi c^2 vol`
    pub fn half_mass_energy(&self, c: &[f64]) -> f64 {
        let vol = self.grid.cell_volume();
        0.5 * c.iter().zip(&self.coeffs.phi).map(|(ci, phi)| phi * ci * ci * vol).sum::<f64>()
    }

    fn solve_flow(&self, c: &[f64], sources: &Sources, step: usize) -> Result<(Vec<f64>, FaceField, SolveStats), SimError> {
        let sys = pressure::assemble_pressure(&self.grid, &self.coeffs, &self.fluid, c, &sources.net());
        let (p, stats) = pressure::solve_pressure(&sys, self.solver.pressure_tol, self.solver.max_iter)
            .map_err(|source| SimError::Solver { stage: "pressure", step, source })?;
        let flux = pressure::darcy_flux_with(&self.grid, &sys.faces, &p);
        Ok((p, flux, stats))
    }

    /// Initial state: `c0` at cell centres and the pressure/velocity from a
    /// solve at `t = 0`.
    pub fn init_state(&self, c0: Vec<f64>) -> Result<SimState, SimError> {
        if c0.len() != self.n_cells() {
            return Err(SimError::Length { got: c0.len(), expected: self.n_cells() });
        }
        if let Some((cell, &value)) = c0.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(SimError::InitialConcentration { cell, value });
        }
        let sources = self.sources_at(0.0)?;
        let (p, flux, _) = self.solve_flow(&c0, &sources, 0)?;
        let u_cell = pressure::cell_velocity(&self.grid, &flux);
        Ok(SimState { step: 0, time: 0.0, c: c0, p, flux, u_cell, acc: Accumulators::default() })
    }

    /// One sequential step: pressure with the current concentration, fluxes,
    /// implicit transport, optional Picard re-solves.
    pub fn step(&self, state: &SimState, dt: f64) -> Result<(SimState, StepRecord), SimError> {
        self.step_with_source(state, dt, None)
    }

    /// As [`Problem::step`], with an extra explicit source density (used by
    /// manufactured solutions) and prescribed fluxes when `flow` is given.
    pub fn step_with_source(&self, state: &SimState, dt: f64, extra: Option<&ExtraForcing<'_>>) -> Result<(SimState, StepRecord), SimError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(SimError::TimeStep(dt));
        }
        let step = state.step + 1;
        let t_new = state.time + dt;
        let grid = &self.grid;
        let vol = grid.cell_volume();
        let sources = self.sources_at(t_new)?;
        let extra_source = extra.and_then(|e| e.source);

        let mut c_iter = state.c.clone();
        let mut picard_iterations = 0;
        let (c_new, p, flux, u_cell, tsys, p_stats, t_stats) = loop {
            picard_iterations += 1;
            let (p, flux, p_stats) = match extra.and_then(|e| e.flux) {
                Some(f) => (state.p.clone(), f.clone(), SolveStats { iterations: 0, residual: 0.0 }),
                None => self.solve_flow(&c_iter, &sources, step)?,
            };
            let u_cell = pressure::cell_velocity(grid, &flux);
            let inputs = TransportInputs { flux: &flux, u_cell: &u_cell, sources: &sources, extra_source };
            let tsys = transport::assemble_transport(grid, &self.coeffs, &self.dispersion, &state.c, &inputs, dt, self.solver.transport);
            let (c_new, t_stats) = linalg::solve_bicgstab_from(&tsys.matrix, &tsys.rhs, state.c.clone(), self.solver.transport_tol, self.solver.max_iter)
                .map_err(|source| SimError::Solver { stage: "transport", step, source })?;
            let Some(picard) = self.solver.picard else {
                break (c_new, p, flux, u_cell, tsys, p_stats, t_stats);
            };
            let change = c_new.iter().zip(&c_iter).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            if !change.is_finite() || change > picard.tol {
                if picard_iterations >= picard.max_iter || !change.is_finite() {
                    return Err(SimError::Picard { step, iterations: picard_iterations, change });
                }
                c_iter = c_new;
                continue;
            }
            break (c_new, p, flux, u_cell, tsys, p_stats, t_stats);
        };

        let min_c = c_new.iter().copied().fold(f64::INFINITY, f64::min);
        let max_c = c_new.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let in_bounds = min_c >= -BOUNDS_TOL && max_c <= 1.0 + BOUNDS_TOL;
        let c_new = match (in_bounds, self.solver.bounds) {
            (true, _) => c_new.into_iter().map(|v| v.clamp(0.0, 1.0)).collect::<Vec<_>>(),
            (false, BoundsPolicy::Abort) => return Err(SimError::MaximumPrinciple { step, min: min_c, max: max_c }),
            (false, BoundsPolicy::Record) => c_new,
        };

        // mass balance with phi = 1 as test function
        let phi = &self.coeffs.phi;
        let mut change = 0.0;
        let mut injected = 0.0;
        let mut produced = 0.0;
        let mut forced = 0.0;
        let mut budget = 0.0;
        for i in 0..c_new.len() {
            change += phi[i] * (c_new[i] - state.c[i]) * vol;
            injected += dt * sources.c_hat[i] * sources.q_inj[i] * vol;
            produced += dt * c_new[i] * sources.q_prod[i] * vol;
            if let Some(e) = extra_source {
                forced += dt * e[i] * vol;
                budget += (dt * e[i] * vol).abs();
            }
            budget += phi[i] * state.c[i].abs() * vol;
        }
        budget += injected + produced;
        let imbalance = (change - (injected - produced + forced)).abs();
        let mass_residual = if budget > 0.0 { imbalance / budget } else { imbalance };

        let diss = transport::dissipation(grid, &tsys.face_dispersion, &c_new);
        let dhalf = transport::sqrt_dispersion_norm2(grid, &tsys.cell_tensors, &c_new);
        let acc = Accumulators {
            injected: state.acc.injected + injected,
            produced: state.acc.produced + produced,
            dissipation: state.acc.dissipation + dt * diss,
            dhalf: state.acc.dhalf + dt * dhalf,
        };
        let dcdt_l2 = c_new
            .iter()
            .zip(&state.c)
            .zip(phi)
            .map(|((a, b), ph)| {
                let r = ph * (a - b) / dt;
                r * r * vol
            })
            .sum::<f64>()
            .sqrt();

        let new_state = SimState { step, time: t_new, c: c_new, p, flux, u_cell, acc };
        let record = StepRecord {
            step,
            time: t_new,
            dt,
            min_c,
            max_c,
            mass_residual,
            compat_residual: sources.imbalance(vol).abs(),
            lambda: sources.lambda,
            energy_lhs: self.half_mass_energy(&new_state.c) + acc.dissipation,
            dissipation: acc.dissipation,
            dhalf: acc.dhalf,
            dcdt_l2,
            max_speed: new_state.max_speed(),
            max_flux: new_state.flux.max_abs(),
            picard_iterations,
            pressure_iterations: p_stats.iterations,
            transport_iterations: t_stats.iterations,
            transport_residual: t_stats.residual,
        };
        Ok((new_state, record))
    }

    /// Diagnostics of the initial state (step 0).
    pub fn initial_record(&self, state: &SimState) -> Result<StepRecord, SimError> {
        let sources = self.sources_at(0.0)?;
        Ok(StepRecord {
            step: 0,
            time: 0.0,
            dt: 0.0,
            min_c: state.c.iter().copied().fold(f64::INFINITY, f64::min),
            max_c: state.c.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            compat_residual: sources.imbalance(self.grid.cell_volume()).abs(),
            lambda: sources.lambda,
            energy_lhs: self.half_mass_energy(&state.c),
            max_speed: state.max_speed(),
            max_flux: state.flux.max_abs(),
            ..StepRecord::default()
        })
    }
}

/// Forcing used by manufactured-solution runs.
pub struct ExtraForcing<'a> {
    pub source: Option<&'a [f64]>,
    /// Prescribed face fluxes replacing the pressure solve.
    pub flux: Option<&'a FaceField>,
}

/// Step sizes covering `[0, final_time]` with a constant `dt`; the last step
/// is shortened when `final_time` is not a multiple of `dt`.
pub fn time_steps(final_time: f64, dt: f64) -> Result<Vec<f64>, SimError> {
    if !(final_time > 0.0 && final_time.is_finite()) {
        return Err(SimError::FinalTime(final_time));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(SimError::TimeStep(dt));
    }
    let ratio = final_time / dt;
    let whole = (ratio + 1e-9).floor() as usize;
    let mut steps = vec![dt; whole];
    let rest = final_time - whole as f64 * dt;
    if rest > 1e-9 * dt {
        steps.push(rest);
    }
    Ok(steps)
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub initial: SimState,
    pub final_state: SimState,
    /// Records for steps `0..=n`.
    pub history: Vec<StepRecord>,
}

/// Runs the time loop; `observer` sees every state including the initial one.
pub fn run(
    problem: &Problem,
    c0: Vec<f64>,
    final_time: f64,
    dt: f64,
    observer: &mut dyn FnMut(&SimState, &StepRecord),
) -> Result<RunOutput, SimError> {
    let steps = time_steps(final_time, dt)?;
    let initial = problem.init_state(c0)?;
    let rec0 = problem.initial_record(&initial)?;
    observer(&initial, &rec0);
    let mut history = vec![rec0];
    let mut state = initial.clone();
    for h in steps {
        let (next, rec) = problem.step(&state, h)?;
        observer(&next, &rec);
        history.push(rec);
        state = next;
    }
    Ok(RunOutput { initial, final_state: state, history })
}
