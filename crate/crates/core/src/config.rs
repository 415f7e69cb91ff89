//! Run configuration: a TOML document with one table per concern.
//!
//! ```toml
//! [grid]
//! nx = 16
//! ny = 16
//! lx = 1.0
//! ly = 1.0
//!
//! [time]
//! final_time = 0.1
//! dt = 0.005
//!
//! [rock]
//! porosity = { kind = "constant", value = 0.2 }
//! permeability = { kind = "constant", value = 1.0 }
//!
//! [fluid]
//! mu0 = 1.0
//! mobility_ratio = 4.0
//!
//! [dispersion]
//! dm = 1e-3
//! dl = 1e-2
//! dt = 1e-3
//!
//! [[wells.atoms]]
//! x = 0.0
//! y = 0.0
//! weight = 1.0
//! role = "inject"
//! rate = 1.0
//! c_hat = 1.0
//! ```
//!
//! See the repository README for every key and its default.

use crate::error::SimError;
use crate::fields::{CoefficientFields, DispersionModel, FluidModel, Sym2};
use crate::grid::Grid;
use crate::sim::{BoundsPolicy, PicardSettings, Problem, SolverSettings};
use crate::transport::TransportOptions;
use crate::wells::{Atom, Schedule, WellRole, WellSet};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub grid: GridSpec,
    pub time: TimeSpec,
    #[serde(default)]
    pub rock: RockSpec,
    #[serde(default)]
    pub fluid: FluidSpec,
    #[serde(default)]
    pub dispersion: DispersionSpec,
    #[serde(default)]
    pub initial: InitialSpec,
    #[serde(default)]
    pub wells: WellsSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    #[serde(default = "one")]
    pub lx: f64,
    #[serde(default = "one")]
    pub ly: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub final_time: f64,
    pub dt: f64,
}

/// Scalar cell field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalarField {
    Constant { value: f64 },
    /// Alternating values, `values[0]` on cells with even `i + j`.
    Checkerboard { values: [f64; 2] },
    /// Row-major per-cell values.
    Table { values: Vec<f64> },
}

/// Diagonal permeability field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PermeabilityField {
    Constant { value: f64 },
    Diagonal { kxx: f64, kyy: f64 },
    Checkerboard { values: [f64; 2] },
    Table { kxx: Vec<f64>, kyy: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RockSpec {
    #[serde(default = "unit_scalar")]
    pub porosity: ScalarField,
    #[serde(default = "unit_perm")]
    pub permeability: PermeabilityField,
    /// Porosity bound constant; derived from the field when absent.
    pub phi_star: Option<f64>,
    /// Permeability bound constant; derived from the field when absent.
    pub k_star: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluidSpec {
    #[serde(default = "one")]
    pub mu0: f64,
    #[serde(default = "one")]
    pub mobility_ratio: f64,
    #[serde(default = "one")]
    pub rho0: f64,
    #[serde(default = "one")]
    pub rho1: f64,
    #[serde(default)]
    pub gravity: bool,
    #[serde(default = "default_g")]
    pub g: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersionSpec {
    #[serde(default = "default_dm")]
    pub dm: f64,
    #[serde(default = "default_dl")]
    pub dl: f64,
    #[serde(default = "default_dm")]
    pub dt: f64,
    pub trunc_k: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    Constant { value: f64 },
    /// `value` on `x < lx / 2`, zero elsewhere.
    LeftHalf { value: f64 },
    Table { values: Vec<f64> },
}

/// Rate or concentration: a number or a list of `[start_time, value]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScheduleSpec {
    Constant(f64),
    Table(Vec<(f64, f64)>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub x: f64,
    pub y: f64,
    #[serde(default = "one")]
    pub weight: f64,
    pub role: WellRole,
    #[serde(default = "unit_schedule")]
    pub rate: ScheduleSpec,
    #[serde(default = "unit_schedule")]
    pub c_hat: ScheduleSpec,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WellsSpec {
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default)]
    pub atoms: Vec<AtomSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default = "default_tol")]
    pub pressure_tol: f64,
    #[serde(default = "default_tol")]
    pub transport_tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub picard: bool,
    #[serde(default = "default_picard_tol")]
    pub picard_tol: f64,
    #[serde(default = "default_picard_max")]
    pub picard_max_iter: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Snapshot every `cadence` steps (the final step is always written).
    #[serde(default = "default_cadence")]
    pub cadence: usize,
    pub dir: Option<String>,
}

fn one() -> f64 {
    1.0
}
fn unit_scalar() -> ScalarField {
    ScalarField::Constant { value: 1.0 }
}
fn unit_perm() -> PermeabilityField {
    PermeabilityField::Constant { value: 1.0 }
}
fn unit_schedule() -> ScheduleSpec {
    ScheduleSpec::Constant(1.0)
}
fn default_g() -> [f64; 2] {
    [0.0, -9.81]
}
fn default_dm() -> f64 {
    1e-3
}
fn default_dl() -> f64 {
    1e-2
}
fn default_tol() -> f64 {
    1e-12
}
fn default_max_iter() -> usize {
    5000
}
fn default_picard_tol() -> f64 {
    1e-8
}
fn default_picard_max() -> usize {
    20
}
fn default_cadence() -> usize {
    10
}

impl Default for RockSpec {
    fn default() -> Self {
        RockSpec { porosity: unit_scalar(), permeability: unit_perm(), phi_star: None, k_star: None }
    }
}
impl Default for FluidSpec {
    fn default() -> Self {
        FluidSpec { mu0: 1.0, mobility_ratio: 1.0, rho0: 1.0, rho1: 1.0, gravity: false, g: default_g() }
    }
}
impl Default for DispersionSpec {
    fn default() -> Self {
        DispersionSpec { dm: default_dm(), dl: default_dl(), dt: default_dm(), trunc_k: None }
    }
}
impl Default for InitialSpec {
    fn default() -> Self {
        InitialSpec::Constant { value: 0.0 }
    }
}
impl Default for SolverSpec {
    fn default() -> Self {
        SolverSpec {
            pressure_tol: default_tol(),
            transport_tol: default_tol(),
            max_iter: default_max_iter(),
            picard: false,
            picard_tol: default_picard_tol(),
            picard_max_iter: default_picard_max(),
        }
    }
}
impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { cadence: default_cadence(), dir: None }
    }
}

impl ScheduleSpec {
    fn build(&self) -> Result<Schedule, SimError> {
        Ok(match self {
            ScheduleSpec::Constant(v) => Schedule::constant(*v),
            ScheduleSpec::Table(t) => Schedule::table(t.clone())?,
        })
    }
}

fn sample_scalar(field: &ScalarField, grid: &Grid, what: &str) -> Result<Vec<f64>, SimError> {
    let n = grid.n_cells();
    Ok(match field {
        ScalarField::Constant { value } => vec![*value; n],
        ScalarField::Checkerboard { values } => (0..n)
            .map(|c| {
                let (i, j) = grid.ij(c);
                values[(i + j) % 2]
            })
            .collect(),
        ScalarField::Table { values } => {
            if values.len() != n {
                return Err(SimError::Config(format!("{what} table has {} values, grid has {n} cells", values.len())));
            }
            values.clone()
        }
    })
}

fn sample_perm(field: &PermeabilityField, grid: &Grid) -> Result<Vec<Sym2>, SimError> {
    let n = grid.n_cells();
    Ok(match field {
        PermeabilityField::Constant { value } => vec![Sym2::diag(*value, *value); n],
        PermeabilityField::Diagonal { kxx, kyy } => vec![Sym2::diag(*kxx, *kyy); n],
        PermeabilityField::Checkerboard { values } => sample_scalar(&ScalarField::Checkerboard { values: *values }, grid, "permeability")?
            .into_iter()
            .map(|k| Sym2::diag(k, k))
            .collect(),
        PermeabilityField::Table { kxx, kyy } => {
            if kxx.len() != n || kyy.len() != n {
                return Err(SimError::Config(format!("permeability tables need {n} values each")));
            }
            kxx.iter().zip(kyy).map(|(a, b)| Sym2::diag(*a, *b)).collect()
        }
    })
}

/// Largest bound constant in `(0, 1]` admitted by the samples.
fn derived_bound(values: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = values.fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    lo.min(1.0 / hi).min(1.0)
}

impl SimConfig {
    pub fn grid(&self) -> Result<Grid, SimError> {
        Ok(Grid::new(self.grid.nx, self.grid.ny, self.grid.lx, self.grid.ly)?)
    }

    pub fn coefficient_fields(&self, grid: &Grid) -> Result<CoefficientFields, SimError> {
        let phi = sample_scalar(&self.rock.porosity, grid, "porosity")?;
        let perm = sample_perm(&self.rock.permeability, grid)?;
        let phi_star = self.rock.phi_star.unwrap_or_else(|| derived_bound(phi.iter().copied()));
        let k_star = self.rock.k_star.unwrap_or_else(|| derived_bound(perm.iter().flat_map(|k| [k.xx, k.yy])));
        Ok(CoefficientFields::new(grid, phi, perm, phi_star, k_star)?)
    }

    pub fn fluid_model(&self) -> Result<FluidModel, SimError> {
        let f = &self.fluid;
        let g = if f.gravity { f.g } else { [0.0, 0.0] };
        Ok(FluidModel::new(f.mu0, f.mobility_ratio, f.rho0, f.rho1, g)?)
    }

    pub fn dispersion_model(&self) -> Result<DispersionModel, SimError> {
        let d = &self.dispersion;
        Ok(DispersionModel::new(d.dm, d.dl, d.dt, d.trunc_k)?)
    }

    pub fn well_set(&self) -> Result<WellSet, SimError> {
        let mut atoms = Vec::with_capacity(self.wells.atoms.len());
        for a in &self.wells.atoms {
            atoms.push(Atom { location: [a.x, a.y], weight: a.weight, role: a.role, rate: a.rate.build()?, c_hat: a.c_hat.build()? });
        }
        Ok(WellSet::new(atoms, self.wells.epsilon)?)
    }

    pub fn solver_settings(&self) -> SolverSettings {
        let s = &self.solver;
        SolverSettings {
            pressure_tol: s.pressure_tol,
            transport_tol: s.transport_tol,
            max_iter: s.max_iter,
            picard: s.picard.then_some(PicardSettings { tol: s.picard_tol, max_iter: s.picard_max_iter }),
            bounds: BoundsPolicy::Abort,
            transport: TransportOptions::default(),
        }
    }

    pub fn initial_concentration(&self, grid: &Grid) -> Result<Vec<f64>, SimError> {
        let n = grid.n_cells();
        let c0 = match &self.initial {
            InitialSpec::Constant { value } => vec![*value; n],
            InitialSpec::LeftHalf { value } => (0..n).map(|c| if grid.center(c)[0] < 0.5 * grid.lx() { *value } else { 0.0 }).collect(),
            InitialSpec::Table { values } => {
                if values.len() != n {
                    return Err(SimError::Length { got: values.len(), expected: n });
                }
                values.clone()
            }
        };
        if let Some((cell, &value)) = c0.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(SimError::InitialConcentration { cell, value });
        }
        Ok(c0)
    }

    /// Builds the problem and initial concentration, checking every data
    /// hypothesis.
    pub fn build(&self) -> Result<(Problem, Vec<f64>), SimError> {
        if !(self.time.final_time > 0.0 && self.time.final_time.is_finite()) {
            return Err(SimError::FinalTime(self.time.final_time));
        }
        if !(self.time.dt > 0.0 && self.time.dt.is_finite()) {
            return Err(SimError::TimeStep(self.time.dt));
        }
        let s = &self.solver;
        if !(s.pressure_tol > 0.0 && s.pressure_tol < 1.0 && s.transport_tol > 0.0 && s.transport_tol < 1.0) {
            return Err(SimError::Config("solver tolerances must lie in (0, 1)".into()));
        }
        if s.max_iter == 0 || (s.picard && (s.picard_max_iter == 0 || !(s.picard_tol > 0.0))) {
            return Err(SimError::Config("iteration limits must be positive".into()));
        }
        if self.output.cadence == 0 {
            return Err(SimError::Config("output cadence must be at least 1".into()));
        }
        let grid = self.grid()?;
        let coeffs = self.coefficient_fields(&grid)?;
        let fluid = self.fluid_model()?;
        let dispersion = self.dispersion_model()?;
        let wells = self.well_set()?;
        for t in wells.breakpoints() {
            let mismatch = wells.compatibility_mismatch(t);
            if mismatch > 1e-9 {
                log::warn!("(2.10) injection and production totals differ by {mismatch:.3e} (relative) at t = {t}; injection rates will be rescaled");
            }
        }
        let c0 = self.initial_concentration(&grid)?;
        let problem = Problem::new(grid, coeffs, fluid, dispersion, wells, self.solver_settings())?;
        Ok((problem, c0))
    }
}

/// Parses and validates a TOML configuration.
pub fn parse_config(text: &str) -> Result<SimConfig, SimError> {
    let cfg: SimConfig = toml::from_str(text).map_err(|e| SimError::Config(e.to_string()))?;
    cfg.build()?;
    Ok(cfg)
}

impl SimConfig {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[grid]\nnx = 4\nny = 4\n[time]\nfinal_time = 1.0\ndt = 0.1\n";

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.grid.lx, 1.0);
        assert_eq!(cfg.fluid.mobility_ratio, 1.0);
        assert_eq!(cfg.solver.pressure_tol, 1e-12);
        assert_eq!(cfg.initial, InitialSpec::Constant { value: 0.0 });
        assert!(cfg.wells.atoms.is_empty());
        let (p, c0) = cfg.build().unwrap();
        assert_eq!(p.n_cells(), 16);
        assert_eq!(c0, vec![0.0; 16]);
    }

    fn err_of(extra: &str) -> String {
        parse_config(&format!("{MINIMAL}{extra}")).unwrap_err().to_string()
    }

    #[test]
    fn hypothesis_violations_name_their_tag() {
        assert!(err_of("[fluid]\nmobility_ratio = 0.0\n").contains("(2.4)"));
        assert!(err_of("[dispersion]\ndt = 0.0\n").contains("(2.5) ellipticity"));
        assert!(err_of("[initial]\nkind = \"constant\"\nvalue = 1.2\n").contains("(2.7) initial concentration"));
        assert!(err_of("[rock]\nporosity = { kind = \"constant\", value = 0.2 }\nphi_star = 0.5\n").contains("(2.3)"));
        assert!(err_of("[rock]\npermeability = { kind = \"diagonal\", kxx = 1.0, kyy = 50.0 }\nk_star = 0.1\n").contains("(2.2)"));
        assert!(err_of("[[wells.atoms]]\nx = 0.5\ny = 0.5\nrole = \"inject\"\nc_hat = 1.5\n").contains("(2.6)"));
        assert!(err_of("[[wells.atoms]]\nx = 0.5\ny = 0.5\nrole = \"produce\"\nrate = -1.0\n").contains("(2.9)"));
        let t = parse_config("[grid]\nnx = 4\nny = 4\n[time]\nfinal_time = 0.0\ndt = 0.1\n").unwrap_err().to_string();
        assert!(t.contains("(2.1)"));
        assert!(parse_config("[grid]\nnx = 1\nny = 4\n[time]\nfinal_time = 1.0\ndt = 0.1\n").is_err());
        assert!(parse_config("[grid]\nnx = 4\n").is_err());
        assert!(err_of("[bogus]\nx = 1\n").contains("configuration"));
    }

    #[test]
    fn schedules_and_fields_parse() {
        let text = format!(
            "{MINIMAL}[rock]\nporosity = {{ kind = \"checkerboard\", values = [0.2, 0.4] }}\n\
             [[wells.atoms]]\nx = 0.0\ny = 0.0\nrole = \"inject\"\nrate = [[0.0, 1.0], [0.5, 2.0]]\n\
             [[wells.atoms]]\nx = 1.0\ny = 1.0\nrole = \"produce\"\nrate = [[0.0, 1.0], [0.5, 2.0]]\n"
        );
        let cfg = parse_config(&text).unwrap();
        let (p, _) = cfg.build().unwrap();
        assert_eq!(p.coeffs.phi[0], 0.2);
        assert_eq!(p.coeffs.phi[1], 0.4);
        assert_eq!(p.wells.atoms[0].rate.value_at(0.7), 2.0);
        // round trip through the serializer
        assert_eq!(parse_config(&cfg.to_toml()).unwrap(), cfg);
    }
}
