//! Field snapshots (legacy VTK plus CSV twin) and CSV reports.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a CSV
//! snapshot read back with [`read_fields_csv`] reproduces the state bit for bit.

use crate::error::SimError;
use crate::grid::Grid;
use crate::sim::{SimState, StepRecord};
use crate::verify::{InvariantReport, SweepReport};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

/// Column order of field CSV files.
pub const FIELD_COLUMNS: [&str; 9] = ["cell", "i", "j", "x", "y", "c", "p", "ux", "uy"];

/// Column order of the per-step report.
pub const REPORT_COLUMNS: [&str; 16] = [
    "step",
    "time",
    "dt",
    "min_c",
    "max_c",
    "mass_residual",
    "compat_residual",
    "lambda",
    "energy_lhs",
    "energy_rhs",
    "dissipation",
    "dhalf",
    "dcdt_l2",
    "max_speed",
    "pressure_iterations",
    "transport_iterations",
];

/// Column order of sweep reports.
pub const SWEEP_COLUMNS: [&str; 8] = ["level", "parameter", "value", "c_l2", "p_l2", "grad_p_l2", "max_speed", "order"];

/// Column order of the invariant summary.
pub const CHECK_COLUMNS: [&str; 5] = ["invariant", "passed", "worst", "tolerance", "step"];

fn num(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:?}")
    }
}

/// Cell fields of one state on `grid`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSnapshot {
    pub c: Vec<f64>,
    pub p: Vec<f64>,
    pub u: Vec<[f64; 2]>,
}

impl FieldSnapshot {
    pub fn of(state: &SimState) -> Self {
        FieldSnapshot { c: state.c.clone(), p: state.p.clone(), u: state.u_cell.clone() }
    }
}

pub fn vtk_string(grid: &Grid, f: &FieldSnapshot, title: &str) -> String {
    let n = grid.n_cells();
    let mut s = String::new();
    s.push_str("# vtk DataFile Version 3.0\n");
    let _ = writeln!(s, "{}", title.lines().next().unwrap_or(""));
    s.push_str("ASCII\nDATASET STRUCTURED_POINTS\n");
    let _ = writeln!(s, "DIMENSIONS {} {} 2", grid.nx() + 1, grid.ny() + 1);
    s.push_str("ORIGIN 0 0 0\n");
    let _ = writeln!(s, "SPACING {:?} {:?} 1.0", grid.dx(), grid.dy());
    let _ = writeln!(s, "CELL_DATA {n}");
    for (name, values) in [("c", &f.c), ("p", &f.p)] {
        let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for v in values.iter() {
            let _ = writeln!(s, "{v:?}");
        }
    }
    s.push_str("VECTORS velocity double\n");
    for u in &f.u {
        let _ = writeln!(s, "{:?} {:?} 0.0", u[0], u[1]);
    }
    s
}

pub fn fields_csv_string(grid: &Grid, f: &FieldSnapshot) -> String {
    let mut s = FIELD_COLUMNS.join(",");
    s.push('\n');
    for cell in 0..grid.n_cells() {
        let (i, j) = grid.ij(cell);
        let x = grid.center(cell);
        let _ = writeln!(s, "{cell},{i},{j},{:?},{:?},{:?},{:?},{:?},{:?}", x[0], x[1], f.c[cell], f.p[cell], f.u[cell][0], f.u[cell][1]);
    }
    s
}

/// Writes `<stem>.vtk` and `<stem>.csv` into `dir`, returning both paths.
pub fn write_fields(grid: &Grid, f: &FieldSnapshot, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf), SimError> {
    fs::create_dir_all(dir)?;
    let vtk = dir.join(format!("{stem}.vtk"));
    let csv = dir.join(format!("{stem}.csv"));
    fs::write(&vtk, vtk_string(grid, f, stem))?;
    fs::write(&csv, fields_csv_string(grid, f))?;
    Ok((vtk, csv))
}

/// Reads a field CSV back.
pub fn read_fields_csv(path: &Path) -> Result<FieldSnapshot, SimError> {
    let mut rdr = csv::Reader::from_path(path)?;
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(FIELD_COLUMNS.iter().copied()) {
        return Err(SimError::Config(format!("{}: unexpected header {:?}", path.display(), headers)));
    }
    let mut out = FieldSnapshot { c: Vec::new(), p: Vec::new(), u: Vec::new() };
    for rec in rdr.records() {
        let rec = rec?;
        let get = |k: usize| -> Result<f64, SimError> {
            rec[k].parse::<f64>().map_err(|e| SimError::Config(format!("{}: {e}", path.display())))
        };
        out.c.push(get(5)?);
        out.p.push(get(6)?);
        out.u.push([get(7)?, get(8)?]);
    }
    Ok(out)
}

/// Steps at which snapshots are written: every `cadence`-th step and the last.
pub fn snapshot_steps(n_steps: usize, cadence: usize) -> Vec<usize> {
    let cadence = cadence.max(1);
    let mut s: Vec<usize> = (0..=n_steps).step_by(cadence).collect();
    if s.last() != Some(&n_steps) {
        s.push(n_steps);
    }
    s
}

pub fn report_csv_string(history: &[StepRecord], report: &InvariantReport) -> String {
    let mut s = REPORT_COLUMNS.join(",");
    s.push('\n');
    for (r, row) in history.iter().zip(&report.rows) {
        let cols = [
            r.step.to_string(),
            num(r.time),
            num(r.dt),
            num(r.min_c),
            num(r.max_c),
            num(r.mass_residual),
            num(r.compat_residual),
            num(r.lambda),
            num(r.energy_lhs),
            num(row.energy_rhs),
            num(r.dissipation),
            num(r.dhalf),
            num(r.dcdt_l2),
            num(r.max_speed),
            r.pressure_iterations.to_string(),
            r.transport_iterations.to_string(),
        ];
        s.push_str(&cols.join(","));
        s.push('\n');
    }
    s
}

pub fn checks_csv_string(report: &InvariantReport) -> String {
    let mut s = CHECK_COLUMNS.join(",");
    s.push('\n');
    for c in &report.checks {
        let step = c.step.map(|s| s.to_string()).unwrap_or_default();
        let _ = writeln!(s, "{},{},{},{},{}", c.name, c.passed, num(c.worst), num(c.tolerance), step);
    }
    s
}

pub fn sweep_csv_string(report: &SweepReport) -> String {
    let mut s = SWEEP_COLUMNS.join(",");
    s.push('\n');
    for (level, r) in report.rows.iter().enumerate() {
        let _ = writeln!(
            s,
            "{level},{},{},{},{},{},{},{}",
            report.parameter,
            num(r.value),
            num(r.c_l2),
            num(r.p_l2),
            num(r.grad_p_l2),
            num(r.max_speed),
            num(r.order)
        );
    }
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<(), SimError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, text)?;
    Ok(())
}
