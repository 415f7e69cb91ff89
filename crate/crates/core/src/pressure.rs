//! Two-point flux pressure solve for the pure-Neumann Darcy problem and
//! reconstruction of face fluxes and cell velocities.

use crate::fields::{CoefficientFields, FluidModel};
use crate::grid::{Axis, FaceField, Grid};
use crate::linalg::{self, CsrMatrix, LinalgError, SolveStats};
use crate::par;

/// Face mobility data shared by assembly and flux reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceCoefficients {
    /// Harmonic mean of `K_nn / mu(c)` of the two adjacent cells.
    pub mobility: FaceField,
    /// `mobility / dist`.
    pub trans: FaceField,
    /// Gravity flux `mobility * rho_face * g . n` per unit area.
    pub gravity: FaceField,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PressureSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub faces: FaceCoefficients,
}

fn harmonic(a: f64, b: f64) -> f64 {
    if a + b == 0.0 {
        0.0
    } else {
        2.0 * a * b / (a + b)
    }
}

pub fn face_coefficients(grid: &Grid, cf: &CoefficientFields, fm: &FluidModel, c: &[f64]) -> FaceCoefficients {
    let mut mobility = FaceField::zeros(grid);
    let mut trans = FaceField::zeros(grid);
    let mut gravity = FaceField::zeros(grid);
    let mu: Vec<f64> = c.iter().map(|&ci| fm.viscosity(ci)).collect();
    for f in grid.interior_faces() {
        let lam_lo = cf.perm[f.lo].normal(f.axis) / mu[f.lo];
        let lam_hi = cf.perm[f.hi].normal(f.axis) / mu[f.hi];
        let lam = harmonic(lam_lo, lam_hi);
        mobility.set(f.axis, f.slot, lam);
        trans.set(f.axis, f.slot, lam / f.dist);
        let g_n = fm.gravity[f.axis.index()];
        if g_n != 0.0 {
            let rho = 0.5 * (fm.density(c[f.lo]) + fm.density(c[f.hi]));
            gravity.set(f.axis, f.slot, lam * rho * g_n);
        }
    }
    FaceCoefficients { mobility, trans, gravity }
}

/// Assembles `sum_f T_f A_f (p_i - p_j) = (q_inj - q_prod)_i vol - gravity
/// outflux`, a symmetric matrix with zero row sums.
pub fn assemble_pressure(grid: &Grid, cf: &CoefficientFields, fm: &FluidModel, c: &[f64], net_source: &[f64]) -> PressureSystem {
    let faces = face_coefficients(grid, cf, fm, c);
    let n = grid.n_cells();
    let vol = grid.cell_volume();
    let mut rhs: Vec<f64> = net_source.iter().map(|s| s * vol).collect();
    let mut triplets = Vec::with_capacity(5 * n);
    for f in grid.interior_faces() {
        let t = faces.trans.get(f.axis, f.slot) * f.area;
        triplets.push((f.lo, f.lo, t));
        triplets.push((f.hi, f.hi, t));
        triplets.push((f.lo, f.hi, -t));
        triplets.push((f.hi, f.lo, -t));
        let g = faces.gravity.get(f.axis, f.slot) * f.area;
        rhs[f.lo] -= g;
        rhs[f.hi] += g;
    }
    // isolated cells still need a diagonal for Jacobi
    for i in 0..n {
        triplets.push((i, i, 0.0));
    }
    let matrix = CsrMatrix::from_triplets(n, &triplets).flagged_symmetric();
    PressureSystem { matrix, rhs, faces }
}

/// Conjugate-gradient solve with the right-hand side projected to zero sum;
/// the returned pressure has zero mean.
pub fn solve_pressure(sys: &PressureSystem, tol: f64, maxit: usize) -> Result<(Vec<f64>, SolveStats), LinalgError> {
    linalg::solve_cg(&sys.matrix, &sys.rhs, tol, maxit, true)
}

/// Face fluxes per unit area `U_f = -T_f (p_hi - p_lo) + G_f`; boundary
/// faces carry zero flux.
pub fn darcy_flux_with(grid: &Grid, faces: &FaceCoefficients, p: &[f64]) -> FaceField {
    let mut u = FaceField::zeros(grid);
    for f in grid.interior_faces() {
        let v = -faces.trans.get(f.axis, f.slot) * (p[f.hi] - p[f.lo]) + faces.gravity.get(f.axis, f.slot);
        u.set(f.axis, f.slot, v);
    }
    u
}

pub fn darcy_flux(grid: &Grid, cf: &CoefficientFields, fm: &FluidModel, c: &[f64], p: &[f64]) -> FaceField {
    darcy_flux_with(grid, &face_coefficients(grid, cf, fm, c), p)
}

/// Cell velocity from the mean of opposing face fluxes.
pub fn cell_velocity(grid: &Grid, u: &FaceField) -> Vec<[f64; 2]> {
    par::map_indexed(grid.n_cells(), |cell| {
        let (i, j) = grid.ij(cell);
        [
            0.5 * (u.x[grid.x_face(i, j)] + u.x[grid.x_face(i + 1, j)]),
            0.5 * (u.y[grid.y_face(i, j)] + u.y[grid.y_face(i, j + 1)]),
        ]
    })
}

/// Net volumetric outflux of each cell divided by its volume.
pub fn divergence(grid: &Grid, u: &FaceField) -> Vec<f64> {
    par::map_indexed(grid.n_cells(), |cell| {
        let (i, j) = grid.ij(cell);
        let ax = grid.face_area(Axis::X);
        let ay = grid.face_area(Axis::Y);
        let out = (u.x[grid.x_face(i + 1, j)] - u.x[grid.x_face(i, j)]) * ax + (u.y[grid.y_face(i, j + 1)] - u.y[grid.y_face(i, j)]) * ay;
        out / grid.cell_volume()
    })
}
