//! Post-run invariant checks.

use crate::sim::{Problem, StepRecord, BOUNDS_TOL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Allowed excursion outside `[0, 1]`.
    pub bounds: f64,
    /// Relative per-step mass residual.
    pub mass: f64,
    /// Relative slack on the energy bound.
    pub energy: f64,
    /// Absolute source-integral mismatch.
    pub compatibility: f64,
}

impl Tolerances {
    pub fn for_problem(problem: &Problem) -> Self {
        Tolerances { bounds: BOUNDS_TOL, mass: 10.0 * problem.solver.transport_tol, energy: 1e-8, compatibility: 1e-13 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditRow {
    pub step: usize,
    pub time: f64,
    pub min_c: f64,
    pub max_c: f64,
    pub mass_residual: f64,
    pub compat_residual: f64,
    pub energy_lhs: f64,
    pub energy_rhs: f64,
    pub dhalf: f64,
    pub dcdt_l2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantCheck {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed value of the checked quantity.
    pub worst: f64,
    pub tolerance: f64,
    /// Step of the worst value.
    pub step: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantReport {
    pub tolerances: Tolerances,
    pub rows: Vec<AuditRow>,
    pub checks: Vec<InvariantCheck>,
}

impl InvariantReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&InvariantCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<&InvariantCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// Energy bound at time `t` from data only:
/// `1/2 ||sqrt(Phi) c0||^2 + (sup a + sup b) nu(Omega) t`.
pub fn energy_rhs(problem: &Problem, initial_energy: f64, t: f64) -> f64 {
    let w = &problem.wells;
    initial_energy + (w.a_sup(t) + w.b_sup(t)) * w.total_mass() * t
}

fn worst_of(rows: &[AuditRow], f: impl Fn(&AuditRow) -> f64) -> (f64, Option<usize>) {
    rows.iter().fold((0.0, None), |(w, s), r| {
        let v = f(r);
        if v > w || v.is_nan() {
            (v, Some(r.step))
        } else {
            (w, s)
        }
    })
}

/// Evaluates every invariant over a run history (step 0 first).
pub fn audit_run(problem: &Problem, history: &[StepRecord]) -> InvariantReport {
    let tol = Tolerances::for_problem(problem);
    let e0 = history.first().map(|r| r.energy_lhs).unwrap_or(0.0);
    let rows: Vec<AuditRow> = history
        .iter()
        .map(|r| AuditRow {
            step: r.step,
            time: r.time,
            min_c: r.min_c,
            max_c: r.max_c,
            mass_residual: r.mass_residual,
            compat_residual: r.compat_residual,
            energy_lhs: r.energy_lhs,
            energy_rhs: energy_rhs(problem, e0, r.time),
            dhalf: r.dhalf,
            dcdt_l2: r.dcdt_l2,
        })
        .collect();

    let mut checks = Vec::new();
    let mut push = |name, tolerance: f64, (worst, step): (f64, Option<usize>), ok: bool| {
        checks.push(InvariantCheck { name, passed: ok && !worst.is_nan(), worst, tolerance, step });
    };

    let bounds = worst_of(&rows, |r| (-r.min_c).max(r.max_c - 1.0).max(0.0));
    push("maximum_principle", tol.bounds, bounds, bounds.0 <= tol.bounds);

    let mass = worst_of(&rows, |r| r.mass_residual);
    push("mass_balance", tol.mass, mass, mass.0 <= tol.mass);

    let energy = worst_of(&rows, |r| ((r.energy_lhs - r.energy_rhs) / r.energy_rhs.max(f64::MIN_POSITIVE)).max(0.0));
    push("energy", tol.energy, energy, energy.0 <= tol.energy);

    let dhalf = worst_of(&rows, |r| ((r.dhalf - r.energy_rhs) / r.energy_rhs.max(f64::MIN_POSITIVE)).max(0.0));
    push("dispersion_gradient", tol.energy, dhalf, dhalf.0 <= tol.energy);

    let compat = worst_of(&rows, |r| r.compat_residual);
    push("compatibility", tol.compatibility, compat, compat.0 <= tol.compatibility);

    // monitored only: finite time increments
    let dcdt = worst_of(&rows, |r| r.dcdt_l2);
    push("time_derivative", f64::INFINITY, dcdt, dcdt.0.is_finite());

    InvariantReport { tolerances: tol, rows, checks }
}
