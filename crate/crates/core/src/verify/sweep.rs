//! Well-regularization and dispersion-truncation sweeps.

use super::{l2_diff, run_config, SweepReport, SweepRow};
use crate::config::SimConfig;
use crate::error::SimError;
use crate::grid::Grid;
use crate::par;
use crate::sim::StepRecord;

/// Radius, in cell widths, around each atom excluded from pressure comparisons.
pub const FAR_FIELD_CELLS: f64 = 4.0;

struct LevelRun {
    c: Vec<f64>,
    p: Vec<f64>,
    history: Vec<StepRecord>,
    max_speed: f64,
}

fn run_level(cfg: SimConfig) -> Result<LevelRun, SimError> {
    let (_, _, out) = run_config(&cfg)?;
    let max_speed = out.history.iter().map(|r| r.max_speed).fold(0.0, f64::max);
    Ok(LevelRun { c: out.final_state.c, p: out.final_state.p, history: out.history, max_speed })
}

fn run_all(cfgs: Vec<SimConfig>, jobs: usize) -> Result<Vec<LevelRun>, SimError> {
    par::run_jobs(cfgs, jobs, run_level).into_iter().collect()
}

/// Cells whose centre lies farther than `r0` from every atom.
fn far_field(grid: &Grid, cfg: &SimConfig, r0: f64) -> Vec<bool> {
    (0..grid.n_cells())
        .map(|i| {
            let [x, y] = grid.center(i);
            cfg.wells.atoms.iter().all(|a| (x - a.x).hypot(y - a.y) > r0)
        })
        .collect()
}

/// Off-well pressure difference with the off-well mean shift removed, and
/// off-well face-gradient difference.
fn pressure_differences(grid: &Grid, far: &[bool], p1: &[f64], p0: &[f64]) -> (f64, f64) {
    let vol = grid.cell_volume();
    let d: Vec<f64> = p1.iter().zip(p0).map(|(a, b)| a - b).collect();
    let n_far = far.iter().filter(|&&f| f).count();
    if n_far == 0 {
        return (0.0, 0.0);
    }
    let shift = d.iter().zip(far).filter(|(_, &f)| f).map(|(v, _)| v).sum::<f64>() / n_far as f64;
    let p_l2 = (d.iter().zip(far).filter(|(_, &f)| f).map(|(v, _)| (v - shift).powi(2)).sum::<f64>() * vol).sqrt();
    let grad = grid
        .interior_faces()
        .iter()
        .filter(|f| far[f.lo] && far[f.hi])
        .map(|f| {
            let g = (d[f.hi] - d[f.lo]) / f.dist;
            g * g * f.area * f.dist
        })
        .sum::<f64>()
        .sqrt();
    (p_l2, grad)
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

/// Runs the configuration once per mollification radius (descending, each
/// either 0 or at least two cell widths) and compares consecutive levels.
pub fn regularization_sweep(cfg: &SimConfig, eps: &[f64], jobs: usize) -> Result<SweepReport, SimError> {
    let grid = cfg.grid()?;
    let h = grid.h();
    if eps.len() < 3 {
        return Err(SimError::Config("regularization sweep needs at least 3 values of epsilon".into()));
    }
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(SimError::Config("epsilon values must be strictly descending".into()));
    }
    if let Some(e) = eps.iter().find(|&&e| e != 0.0 && e < 2.0 * h * (1.0 - 1e-12)) {
        return Err(SimError::Config(format!("epsilon {e} is under-resolved: needs 0 or at least {}", 2.0 * h)));
    }
    let cfgs: Vec<SimConfig> = eps
        .iter()
        .map(|&e| {
            let mut c = cfg.clone();
            c.wells.epsilon = e;
            c
        })
        .collect();
    let runs = run_all(cfgs, jobs)?;
    let far = far_field(&grid, cfg, FAR_FIELD_CELLS * h);

    let mut rows = Vec::with_capacity(eps.len());
    let mut compat_worst = 0.0f64;
    for (k, run) in runs.iter().enumerate() {
        let mut row = SweepRow::new(eps[k]);
        row.max_speed = run.max_speed;
        if k > 0 {
            row.c_l2 = l2_diff(&grid, &run.c, &runs[k - 1].c);
            (row.p_l2, row.grad_p_l2) = pressure_differences(&grid, &far, &run.p, &runs[k - 1].p);
        }
        compat_worst = run.history.iter().map(|r| r.compat_residual).fold(compat_worst, f64::max);
        rows.push(row);
    }
    let dc: Vec<f64> = rows[1..].iter().map(|r| r.c_l2).collect();
    let dg: Vec<f64> = rows[1..].iter().map(|r| r.grad_p_l2).collect();
    let all_zero = dc.iter().chain(&dg).all(|&v| v == 0.0);
    let monotone = all_zero || (strictly_decreasing(&dc) && strictly_decreasing(&dg));
    let compat_ok = compat_worst <= 1e-13;
    let summary = format!("c differences {dc:?}, off-well grad p differences {dg:?}, worst compatibility residual {compat_worst:.3e}");
    Ok(SweepReport {
        parameter: "epsilon",
        rows,
        snapshots: runs.into_iter().map(|r| r.c).collect(),
        identical: Vec::new(),
        passed: monotone && compat_ok,
        summary,
    })
}

/// Runs the untruncated configuration and one run per cap `k` (ascending).
/// Level `i` compares against the untruncated run; caps at or above the
/// observed maximum speed must reproduce it bit for bit, and below it the
/// differences must not increase with `k`.
pub fn truncation_sweep(cfg: &SimConfig, ks: &[f64], jobs: usize) -> Result<SweepReport, SimError> {
    if ks.is_empty() {
        return Err(SimError::Config("truncation sweep needs at least one cap".into()));
    }
    if ks.windows(2).any(|w| w[1] <= w[0]) || ks.iter().any(|&k| !(k > 0.0)) {
        return Err(SimError::Config("truncation caps must be positive and strictly ascending".into()));
    }
    let grid = cfg.grid()?;
    let mut cfgs = Vec::with_capacity(ks.len() + 1);
    let mut reference = cfg.clone();
    reference.dispersion.trunc_k = None;
    cfgs.push(reference.clone());
    for &k in ks {
        let mut c = reference.clone();
        c.dispersion.trunc_k = Some(k);
        cfgs.push(c);
    }
    let mut runs = run_all(cfgs, jobs)?;
    let base = runs.remove(0);
    let threshold = base.max_speed;

    let mut rows = Vec::with_capacity(ks.len());
    let mut identical = Vec::with_capacity(ks.len());
    for (k, run) in ks.iter().zip(&runs) {
        let mut row = SweepRow::new(*k);
        row.max_speed = run.max_speed;
        row.c_l2 = l2_diff(&grid, &run.c, &base.c);
        rows.push(row);
        let same = run.c.iter().zip(&base.c).all(|(a, b)| a.to_bits() == b.to_bits()) && run.history == base.history;
        identical.push(same);
    }
    let above_ok = ks.iter().zip(&identical).filter(|(k, _)| **k >= threshold).all(|(_, &s)| s);
    let below: Vec<f64> = ks.iter().zip(&rows).filter(|(k, _)| **k < threshold).map(|(_, r)| r.c_l2).collect();
    let below_ok = below.windows(2).all(|w| w[1] <= w[0]);
    let summary = format!("max |u| = {threshold:.6e}; differences {:?}; identical {:?}", rows.iter().map(|r| r.c_l2).collect::<Vec<_>>(), identical);
    Ok(SweepReport {
        parameter: "k",
        rows,
        snapshots: runs.into_iter().map(|r| r.c).collect(),
        identical,
        passed: above_ok && below_ok,
        summary,
    })
}
