//! Measure-valued wells: weighted atoms, rate schedules, mollification and
//! the discrete compatibility correction.

use crate::grid::{Grid, GridError, Point};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WellError {
    #[error("well {index}: {source}")]
    Location { index: usize, source: GridError },
    #[error("well {index}: weight must be positive and finite, got {weight}")]
    Weight { index: usize, weight: f64 },
    #[error("(2.9) well {index}: rate {value} at t = {time} is negative")]
    NegativeRate { index: usize, time: f64, value: f64 },
    #[error("(2.6) well {index}: injected concentration {value} at t = {time} outside [0, 1]")]
    InjectedConcentration { index: usize, time: f64, value: f64 },
    #[error("mollification radius must be >= 0, got {0}")]
    Epsilon(f64),
    #[error("schedule must be non-empty with increasing, finite start times")]
    Schedule,
    #[error("(2.10) production {production:.6e} with no injection at t = {time}")]
    ProductionWithoutInjection { time: f64, production: f64 },
    #[error("field lengths differ: nu {nu}, a {a}, b {b}")]
    Length { nu: usize, a: usize, b: usize },
}

/// Piecewise-constant function of time given by `(start, value)` pairs.
/// Before the first start time the first value applies.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    steps: Vec<(f64, f64)>,
}

impl Schedule {
    pub fn constant(value: f64) -> Self {
        Schedule { steps: vec![(0.0, value)] }
    }

    pub fn table(steps: Vec<(f64, f64)>) -> Result<Self, WellError> {
        if steps.is_empty() || steps.iter().any(|s| !s.0.is_finite() || !s.1.is_finite()) {
            return Err(WellError::Schedule);
        }
        if steps.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(WellError::Schedule);
        }
        Ok(Schedule { steps })
    }

    pub fn value_at(&self, t: f64) -> f64 {
        let k = self.steps.partition_point(|s| s.0 <= t);
        self.steps[k.saturating_sub(1)].1
    }

    pub fn steps(&self) -> &[(f64, f64)] {
        &self.steps
    }

    pub fn max(&self) -> f64 {
        self.steps.iter().fold(f64::NEG_INFINITY, |m, s| m.max(s.1))
    }

    pub fn min(&self) -> f64 {
        self.steps.iter().fold(f64::INFINITY, |m, s| m.min(s.1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WellRole {
    Inject,
    Produce,
}

/// One atom `weight * delta_location` of the measure, with its rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub location: Point,
    pub weight: f64,
    pub role: WellRole,
    pub rate: Schedule,
    /// Injected concentration; ignored for producers.
    pub c_hat: Schedule,
}

impl Atom {
    pub fn injector(location: Point, weight: f64, rate: f64, c_hat: f64) -> Self {
        Atom { location, weight, role: WellRole::Inject, rate: Schedule::constant(rate), c_hat: Schedule::constant(c_hat) }
    }

    pub fn producer(location: Point, weight: f64, rate: f64) -> Self {
        Atom { location, weight, role: WellRole::Produce, rate: Schedule::constant(rate), c_hat: Schedule::constant(0.0) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WellSet {
    pub atoms: Vec<Atom>,
    /// Mollification radius; 0 deposits each atom in a single cell.
    pub epsilon: f64,
}

/// Cellwise density of the regularized measure, kept per atom so that
/// per-well rates can be attached.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizedMeasure {
    /// Sparse `(cell, density)` contributions of each atom.
    pub per_atom: Vec<Vec<(usize, f64)>>,
    /// Total density `nu_eps`.
    pub density: Vec<f64>,
}

impl RegularizedMeasure {
    /// Discrete `sum nu_eps * vol`.
    pub fn mass(&self, cell_volume: f64) -> f64 {
        self.density.iter().map(|d| d * cell_volume).sum()
    }
}

/// Cellwise rates `a`, `b` and injected concentration before correction.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFields {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c_hat: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrectedRates {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub lambda: f64,
}

/// Source densities `q_inj = a_eff nu_eps`, `q_prod = b_eff nu_eps` at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct Sources {
    pub q_inj: Vec<f64>,
    pub q_prod: Vec<f64>,
    pub c_hat: Vec<f64>,
    pub lambda: f64,
}

impl Sources {
    pub fn zeros(n: usize) -> Self {
        Sources { q_inj: vec![0.0; n], q_prod: vec![0.0; n], c_hat: vec![0.0; n], lambda: 1.0 }
    }

    /// `q_inj - q_prod` per cell.
    pub fn net(&self) -> Vec<f64> {
        self.q_inj.iter().zip(&self.q_prod).map(|(i, p)| i - p).collect()
    }

    /// Discrete `sum (q_inj - q_prod) vol`.
    pub fn imbalance(&self, cell_volume: f64) -> f64 {
        let inj: f64 = self.q_inj.iter().map(|q| q * cell_volume).sum();
        let prod: f64 = self.q_prod.iter().map(|q| q * cell_volume).sum();
        inj - prod
    }
}

impl WellSet {
    pub fn new(atoms: Vec<Atom>, epsilon: f64) -> Result<Self, WellError> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(WellError::Epsilon(epsilon));
        }
        for (index, atom) in atoms.iter().enumerate() {
            if !(atom.weight > 0.0 && atom.weight.is_finite()) {
                return Err(WellError::Weight { index, weight: atom.weight });
            }
            if let Some(&(time, value)) = atom.rate.steps().iter().find(|s| s.1 < 0.0) {
                return Err(WellError::NegativeRate { index, time, value });
            }
            if atom.role == WellRole::Inject {
                if let Some(&(time, value)) = atom.c_hat.steps().iter().find(|s| !(0.0..=1.0).contains(&s.1)) {
                    return Err(WellError::InjectedConcentration { index, time, value });
                }
            }
        }
        Ok(WellSet { atoms, epsilon })
    }

    pub fn none() -> Self {
        WellSet { atoms: Vec::new(), epsilon: 0.0 }
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self, WellError> {
        WellSet::new(self.atoms.clone(), epsilon)
    }

    /// `nu(Omega)`.
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    pub fn regularize(&self, grid: &Grid) -> Result<RegularizedMeasure, WellError> {
        regularize_measure(self, grid)
    }

    /// Rates evaluated at time `t`, before the compatibility correction.
    pub fn rate_fields(&self, reg: &RegularizedMeasure, t: f64) -> RateFields {
        let n = reg.density.len();
        let mut inj = vec![0.0; n];
        let mut prod = vec![0.0; n];
        let mut inj_c = vec![0.0; n];
        for (atom, parts) in self.atoms.iter().zip(&reg.per_atom) {
            let rate = atom.rate.value_at(t);
            for &(cell, d) in parts {
                match atom.role {
                    WellRole::Inject => {
                        inj[cell] += rate * d;
                        inj_c[cell] += atom.c_hat.value_at(t) * rate * d;
                    }
                    WellRole::Produce => prod[cell] += rate * d,
                }
            }
        }
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        let mut c_hat = vec![0.0; n];
        for cell in 0..n {
            let nu = reg.density[cell];
            if nu > 0.0 {
                a[cell] = inj[cell] / nu;
                b[cell] = prod[cell] / nu;
            }
            if inj[cell] > 0.0 {
                c_hat[cell] = (inj_c[cell] / inj[cell]).clamp(0.0, 1.0);
            }
        }
        RateFields { a, b, c_hat }
    }

    /// Source densities at time `t` with exact discrete compatibility.
    pub fn source_fields(&self, reg: &RegularizedMeasure, grid: &Grid, t: f64) -> Result<Sources, WellError> {
        let rates = self.rate_fields(reg, t);
        let corrected = corrected_rates(&reg.density, &rates.a, &rates.b, grid.cell_volume(), t)?;
        let q_inj = corrected.a.iter().zip(&reg.density).map(|(a, nu)| a * nu).collect();
        let q_prod = corrected.b.iter().zip(&reg.density).map(|(b, nu)| b * nu).collect();
        Ok(Sources { q_inj, q_prod, c_hat: rates.c_hat, lambda: corrected.lambda })
    }

    fn role_total(&self, role: WellRole, t: f64) -> f64 {
        self.atoms.iter().filter(|a| a.role == role).map(|a| a.weight * a.rate.value_at(t)).sum()
    }

    /// Correction factor from the atoms alone: production over injection
    /// totals at time `t` (1 when both vanish).
    pub fn data_lambda(&self, t: f64) -> f64 {
        let inj = self.role_total(WellRole::Inject, t);
        let prod = self.role_total(WellRole::Produce, t);
        if inj > 0.0 {
            prod / inj
        } else {
            1.0
        }
    }

    /// Times at which any schedule changes value.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut ts: Vec<f64> = vec![0.0];
        for a in &self.atoms {
            ts.extend(a.rate.steps().iter().map(|s| s.0));
        }
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        ts
    }

    /// Bound on the corrected injection rate over `[0, t_end]`.
    pub fn a_sup(&self, t_end: f64) -> f64 {
        self.breakpoints()
            .into_iter()
            .filter(|&t| t <= t_end)
            .map(|t| {
                let max_rate = self
                    .atoms
                    .iter()
                    .filter(|a| a.role == WellRole::Inject)
                    .map(|a| a.rate.value_at(t))
                    .fold(0.0, f64::max);
                self.data_lambda(t) * max_rate
            })
            .fold(0.0, f64::max)
    }

    /// Bound on the production rate over `[0, t_end]`.
    pub fn b_sup(&self, t_end: f64) -> f64 {
        self.breakpoints()
            .into_iter()
            .filter(|&t| t <= t_end)
            .map(|t| {
                self.atoms
                    .iter()
                    .filter(|a| a.role == WellRole::Produce)
                    .map(|a| a.rate.value_at(t))
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// Relative mismatch of continuous compatibility at `t`.
    pub fn compatibility_mismatch(&self, t: f64) -> f64 {
        let inj = self.role_total(WellRole::Inject, t);
        let prod = self.role_total(WellRole::Produce, t);
        let scale = inj.max(prod);
        if scale == 0.0 {
            0.0
        } else {
            (inj - prod).abs() / scale
        }
    }
}

/// Radial tent kernel `max(0, 1 - r / eps)`.
fn tent(r: f64, eps: f64) -> f64 {
    (1.0 - r / eps).max(0.0)
}

/// Density of the regularized measure on `grid`: atomic deposition for
/// `eps = 0`, otherwise a tent kernel of radius `eps` sampled at cell centres
/// and renormalized so each atom keeps its weight.
pub fn regularize_measure(w: &WellSet, g: &Grid) -> Result<RegularizedMeasure, WellError> {
    let vol = g.cell_volume();
    let mut density = vec![0.0; g.n_cells()];
    let mut per_atom = Vec::with_capacity(w.atoms.len());
    for (index, atom) in w.atoms.iter().enumerate() {
        let home = g.cell_of_point(atom.location).map_err(|source| WellError::Location { index, source })?;
        let mut parts = Vec::new();
        if w.epsilon > 0.0 {
            let [px, py] = atom.location;
            let eps = w.epsilon;
            let i_lo = ((px - eps) / g.dx()).floor().max(0.0) as usize;
            let i_hi = (((px + eps) / g.dx()).ceil() as usize).min(g.nx() - 1);
            let j_lo = ((py - eps) / g.dy()).floor().max(0.0) as usize;
            let j_hi = (((py + eps) / g.dy()).ceil() as usize).min(g.ny() - 1);
            let mut total = 0.0;
            for j in j_lo..=j_hi {
                for i in i_lo..=i_hi {
                    let cell = g.index(i, j);
                    let c = g.center(cell);
                    let k = tent((c[0] - px).hypot(c[1] - py), eps);
                    if k > 0.0 {
                        parts.push((cell, k));
                        total += k * vol;
                    }
                }
            }
            if total > 0.0 {
                for p in &mut parts {
                    p.1 *= atom.weight / total;
                }
            } else {
                parts.clear();
            }
        }
        if parts.is_empty() {
            parts.push((home, atom.weight / vol));
        }
        for &(cell, d) in &parts {
            density[cell] += d;
        }
        per_atom.push(parts);
    }
    Ok(RegularizedMeasure { per_atom, density })
}

/// Rescales `a` by `lambda = (sum b nu vol) / (sum a nu vol)` so that the
/// discrete injection and production integrals agree.
pub fn corrected_rates(nu: &[f64], a: &[f64], b: &[f64], cell_volume: f64, t: f64) -> Result<CorrectedRates, WellError> {
    if nu.len() != a.len() || nu.len() != b.len() {
        return Err(WellError::Length { nu: nu.len(), a: a.len(), b: b.len() });
    }
    let inj: f64 = nu.iter().zip(a).map(|(n, a)| a * n * cell_volume).sum();
    let prod: f64 = nu.iter().zip(b).map(|(n, b)| b * n * cell_volume).sum();
    let lambda = if inj > 0.0 {
        prod / inj
    } else if prod > 0.0 {
        return Err(WellError::ProductionWithoutInjection { time: t, production: prod });
    } else {
        1.0
    };
    Ok(CorrectedRates { a: a.iter().map(|v| v * lambda).collect(), b: b.to_vec(), lambda })
}
