//! Rock and fluid coefficients: porosity, permeability, Koval viscosity,
//! linear density and the Peaceman diffusion-dispersion tensor.

use crate::grid::{Axis, Grid};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldsError {
    #[error("(2.3) porosity {value} in cell {cell} outside [{lo}, {hi}]")]
    Porosity { cell: usize, value: f64, lo: f64, hi: f64 },
    #[error("(2.2) permeability in cell {cell} has eigenvalues ({min}, {max}) outside [{lo}, {hi}]")]
    Permeability { cell: usize, min: f64, max: f64, lo: f64, hi: f64 },
    #[error("(2.2) permeability in cell {cell} is not diagonal; two-point fluxes need grid-aligned tensors")]
    NonDiagonalPermeability { cell: usize },
    #[error("(2.2)/(2.3) bound constant {name} = {value} must lie in (0, 1]")]
    BoundConstant { name: &'static str, value: f64 },
    #[error("field has {got} values, grid has {expected} cells")]
    Length { got: usize, expected: usize },
    #[error("(2.4) viscosity must stay positive: mu0 = {mu0}, M = {m}")]
    Viscosity { mu0: f64, m: f64 },
    #[error("(2.4) densities must be finite: rho0 = {rho0}, rho1 = {rho1}")]
    Density { rho0: f64, rho1: f64 },
    #[error("(2.5) ellipticity requires positive dispersion coefficients, got dm = {dm}, dl = {dl}, dt = {dt}")]
    Dispersion { dm: f64, dl: f64, dt: f64 },
    #[error("truncation level must be positive, got {0}")]
    Truncation(f64),
    #[error("matrix is not symmetric: off-diagonals {0} and {1}")]
    NotSymmetric(f64, f64),
    #[error("matrix is indefinite: smallest eigenvalue {0}")]
    Indefinite(f64),
}

/// Symmetric 2x2 matrix `[[xx, xy], [xy, yy]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Sym2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Sym2 {
    pub const ZERO: Sym2 = Sym2 { xx: 0.0, xy: 0.0, yy: 0.0 };

    pub fn new(xx: f64, xy: f64, yy: f64) -> Self {
        Sym2 { xx, xy, yy }
    }

    pub fn identity() -> Self {
        Sym2::diag(1.0, 1.0)
    }

    pub fn diag(xx: f64, yy: f64) -> Self {
        Sym2 { xx, xy: 0.0, yy }
    }

    pub fn scaled(self, s: f64) -> Self {
        Sym2 { xx: self.xx * s, xy: self.xy * s, yy: self.yy * s }
    }

    pub fn add(self, o: Sym2) -> Self {
        Sym2 { xx: self.xx + o.xx, xy: self.xy + o.xy, yy: self.yy + o.yy }
    }

    pub fn sub(self, o: Sym2) -> Self {
        self.add(o.scaled(-1.0))
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [self.xx * v[0] + self.xy * v[1], self.xy * v[0] + self.yy * v[1]]
    }

    /// `v . M v`
    pub fn quad(&self, v: [f64; 2]) -> f64 {
        let w = self.apply(v);
        v[0] * w[0] + v[1] * w[1]
    }

    pub fn mul(&self, o: &Sym2) -> [[f64; 2]; 2] {
        [
            [self.xx * o.xx + self.xy * o.xy, self.xx * o.xy + self.xy * o.yy],
            [self.xy * o.xx + self.yy * o.xy, self.xy * o.xy + self.yy * o.yy],
        ]
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }

    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.xx + self.yy);
        let r = (0.5 * (self.xx - self.yy)).hypot(self.xy);
        (mean - r, mean + r)
    }

    /// Spectral norm.
    pub fn norm(&self) -> f64 {
        let (lo, hi) = self.eigenvalues();
        lo.abs().max(hi.abs())
    }

    /// Component `n . M n` for the unit normal along `axis`.
    pub fn normal(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.xx,
            Axis::Y => self.yy,
        }
    }

    /// Symmetric positive semi-definite square root.
    pub fn sqrt(&self) -> Result<Sym2, FieldsError> {
        tensor_sqrt([[self.xx, self.xy], [self.xy, self.yy]])
    }
}

/// Principal square root of a symmetric positive semi-definite 2x2 matrix.
///
/// Uses `sqrt(M) = (M + sqrt(det M) I) / sqrt(tr M + 2 sqrt(det M))`, which
/// follows from Cayley-Hamilton.
pub fn tensor_sqrt(m: [[f64; 2]; 2]) -> Result<Sym2, FieldsError> {
    let scale = m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    if (m[0][1] - m[1][0]).abs() > 1e-12 * scale {
        return Err(FieldsError::NotSymmetric(m[0][1], m[1][0]));
    }
    let s = Sym2::new(m[0][0], 0.5 * (m[0][1] + m[1][0]), m[1][1]);
    let (lo, _) = s.eigenvalues();
    if lo < -1e-12 * scale {
        return Err(FieldsError::Indefinite(lo));
    }
    let root_det = s.det().max(0.0).sqrt();
    let t = (s.trace() + 2.0 * root_det).max(0.0).sqrt();
    if t == 0.0 {
        return Ok(Sym2::ZERO);
    }
    Ok(Sym2::new((s.xx + root_det) / t, s.xy / t, (s.yy + root_det) / t))
}

/// Porosity and (diagonal) permeability per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientFields {
    pub phi: Vec<f64>,
    pub perm: Vec<Sym2>,
    pub phi_star: f64,
    pub k_star: f64,
}

impl CoefficientFields {
    pub fn new(grid: &Grid, phi: Vec<f64>, perm: Vec<Sym2>, phi_star: f64, k_star: f64) -> Result<Self, FieldsError> {
        let n = grid.n_cells();
        for (len, _) in [(phi.len(), "phi"), (perm.len(), "perm")] {
            if len != n {
                return Err(FieldsError::Length { got: len, expected: n });
            }
        }
        for (name, value) in [("phi_star", phi_star), ("k_star", k_star)] {
            if !(value > 0.0 && value <= 1.0) {
                return Err(FieldsError::BoundConstant { name, value });
            }
        }
        for (cell, &value) in phi.iter().enumerate() {
            if !(value >= phi_star && value <= 1.0 / phi_star) {
                return Err(FieldsError::Porosity { cell, value, lo: phi_star, hi: 1.0 / phi_star });
            }
        }
        for (cell, k) in perm.iter().enumerate() {
            if k.xy != 0.0 {
                return Err(FieldsError::NonDiagonalPermeability { cell });
            }
            let (min, max) = k.eigenvalues();
            if !(min >= k_star && max <= 1.0 / k_star) {
                return Err(FieldsError::Permeability { cell, min, max, lo: k_star, hi: 1.0 / k_star });
            }
        }
        Ok(CoefficientFields { phi, perm, phi_star, k_star })
    }

    /// Constant porosity and isotropic permeability.
    pub fn uniform(grid: &Grid, phi: f64, k: f64) -> Result<Self, FieldsError> {
        let n = grid.n_cells();
        let phi_star = phi.min(1.0 / phi).min(1.0);
        let k_star = k.min(1.0 / k).min(1.0);
        Self::new(grid, vec![phi; n], vec![Sym2::diag(k, k); n], phi_star, k_star)
    }
}

/// Koval viscosity and linear density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidModel {
    pub mu0: f64,
    pub mobility_ratio: f64,
    pub rho0: f64,
    pub rho1: f64,
    pub gravity: [f64; 2],
}

impl FluidModel {
    pub fn new(mu0: f64, mobility_ratio: f64, rho0: f64, rho1: f64, gravity: [f64; 2]) -> Result<Self, FieldsError> {
        if !(mu0 > 0.0 && mu0.is_finite() && mobility_ratio > 0.0 && mobility_ratio.is_finite()) {
            return Err(FieldsError::Viscosity { mu0, m: mobility_ratio });
        }
        if !(rho0.is_finite() && rho1.is_finite()) {
            return Err(FieldsError::Density { rho0, rho1 });
        }
        Ok(FluidModel { mu0, mobility_ratio, rho0, rho1, gravity })
    }

    pub fn viscosity(&self, c: f64) -> f64 {
        viscosity(c, self)
    }

    pub fn density(&self, c: f64) -> f64 {
        density(c, self)
    }

    pub fn has_gravity(&self) -> bool {
        self.gravity != [0.0, 0.0]
    }
}

fn clamp01(c: f64) -> f64 {
    c.clamp(0.0, 1.0)
}

/// `mu(c) = mu0 (1 + (M^{1/4} - 1) c)^{-4}` with `c` clamped to `[0, 1]`.
pub fn viscosity(c: f64, fm: &FluidModel) -> f64 {
    let c = clamp01(c);
    let base = 1.0 + (fm.mobility_ratio.powf(0.25) - 1.0) * c;
    fm.mu0 / base.powi(4)
}

/// `rho(c) = (1 - c) rho0 + c rho1` with `c` clamped to `[0, 1]`.
pub fn density(c: f64, fm: &FluidModel) -> f64 {
    let c = clamp01(c);
    (1.0 - c) * fm.rho0 + c * fm.rho1
}

/// Molecular, longitudinal and transverse coefficients plus an optional
/// velocity cap `trunc_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionModel {
    pub dm: f64,
    pub dl: f64,
    pub dt: f64,
    pub trunc_k: Option<f64>,
}

impl DispersionModel {
    pub fn new(dm: f64, dl: f64, dt: f64, trunc_k: Option<f64>) -> Result<Self, FieldsError> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if !(ok(dm) && ok(dl) && ok(dt)) {
            return Err(FieldsError::Dispersion { dm, dl, dt });
        }
        if let Some(k) = trunc_k {
            if !(k > 0.0) {
                return Err(FieldsError::Truncation(k));
            }
        }
        Ok(DispersionModel { dm, dl, dt, trunc_k })
    }

    pub fn with_truncation(self, trunc_k: Option<f64>) -> Self {
        DispersionModel { trunc_k, ..self }
    }

    /// Tensor used by the scheme: truncated when `trunc_k` is set.
    pub fn tensor(&self, phi: f64, u: [f64; 2]) -> Sym2 {
        match self.trunc_k {
            Some(k) if k.is_finite() => dispersion_tensor_truncated(phi, u, k, self),
            _ => dispersion_tensor(phi, u, self),
        }
    }

    /// Lower ellipticity constant `phi_* min(dm, dl, dt)`.
    pub fn alpha(&self, phi_star: f64) -> f64 {
        phi_star * self.dm.min(self.dl).min(self.dt)
    }

    /// Growth constant `phi_*^{-1} max(dm, dl, dt)`.
    pub fn lambda(&self, phi_star: f64) -> f64 {
        self.dm.max(self.dl).max(self.dt) / phi_star
    }
}

/// Flow-direction projection `u u^T / |u|^2`; zero at `u = 0`.
pub fn flow_projection(u: [f64; 2]) -> Sym2 {
    let s2 = u[0] * u[0] + u[1] * u[1];
    if s2 == 0.0 {
        return Sym2::ZERO;
    }
    Sym2::new(u[0] * u[0] / s2, u[0] * u[1] / s2, u[1] * u[1] / s2)
}

/// Peaceman tensor `Phi (dm I + |u| (dl E(u) + dt (I - E(u))))`.
pub fn dispersion_tensor(phi: f64, u: [f64; 2], dm: &DispersionModel) -> Sym2 {
    let speed = u[0].hypot(u[1]);
    if speed == 0.0 {
        return Sym2::diag(phi * dm.dm, phi * dm.dm);
    }
    let iso = dm.dm + dm.dt * speed;
    let along = (dm.dl - dm.dt) / speed;
    Sym2::new(
        phi * (iso + along * u[0] * u[0]),
        phi * along * u[0] * u[1],
        phi * (iso + along * u[1] * u[1]),
    )
}

/// Peaceman tensor at the velocity whose magnitude is capped at `k`.
pub fn dispersion_tensor_truncated(phi: f64, u: [f64; 2], k: f64, dm: &DispersionModel) -> Sym2 {
    let speed = u[0].hypot(u[1]);
    if speed < k {
        return dispersion_tensor(phi, u, dm);
    }
    let s = k / speed;
    dispersion_tensor(phi, [u[0] * s, u[1] * s], dm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn fluid(mu0: f64, m: f64) -> FluidModel {
        FluidModel::new(mu0, m, 1000.0, 800.0, [0.0, 0.0]).unwrap()
    }

    #[test]
    fn koval_viscosity() {
        let fm = fluid(2.0, 16.0);
        assert_abs_diff_eq!(viscosity(0.0, &fm), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(viscosity(1.0, &fm), 0.125, epsilon = 1e-15);
        assert_abs_diff_eq!(viscosity(0.5, &fluid(1.0, 1.0)), 1.0, epsilon = 0.0);
        // clamped outside [0, 1]
        assert_eq!(viscosity(-0.5, &fm), viscosity(0.0, &fm));
        assert_eq!(viscosity(1.5, &fm), viscosity(1.0, &fm));
    }

    #[test]
    fn viscosity_decreases_for_favourable_ratio() {
        let fm = fluid(1.0, 5.0);
        let mut prev = f64::INFINITY;
        for i in 0..=100 {
            let mu = viscosity(i as f64 / 100.0, &fm);
            assert!(mu > 0.0 && mu <= prev);
            prev = mu;
        }
    }

    #[test]
    fn density_linear() {
        let fm = fluid(1.0, 1.0);
        assert_eq!(density(0.0, &fm), 1000.0);
        assert_eq!(density(1.0, &fm), 800.0);
        assert_abs_diff_eq!(density(0.5, &fm), 900.0, epsilon = 1e-12);
    }

    #[test]
    fn fluid_rejects_bad_ratio() {
        assert!(FluidModel::new(1.0, 0.0, 1.0, 1.0, [0.0, 0.0]).is_err());
        assert!(FluidModel::new(-1.0, 2.0, 1.0, 1.0, [0.0, 0.0]).is_err());
    }

    #[test]
    fn tensor_examples() {
        let dm = DispersionModel::new(0.1, 1.0, 0.01, None).unwrap();
        let d = dispersion_tensor(1.0, [0.0, 0.0], &dm);
        assert_eq!(d, Sym2::diag(0.1, 0.1));

        let d = dispersion_tensor(1.0, [1.0, 0.0], &dm);
        assert_abs_diff_eq!(d.xx, 1.1, epsilon = 1e-15);
        assert_abs_diff_eq!(d.yy, 0.11, epsilon = 1e-15);
        assert_eq!(d.xy, 0.0);

        let ones = DispersionModel::new(1.0, 1.0, 1.0, None).unwrap();
        let d = dispersion_tensor(2.0, [3.0, 4.0], &ones);
        assert_abs_diff_eq!(d.xx, 12.0, epsilon = 1e-13);
        assert_abs_diff_eq!(d.yy, 12.0, epsilon = 1e-13);
        assert_abs_diff_eq!(d.xy, 0.0, epsilon = 1e-13);
    }

    #[test]
    fn truncated_examples() {
        let dm = DispersionModel::new(0.1, 1.0, 0.01, None).unwrap();
        let u = [1.2, -1.6];
        assert_eq!(dispersion_tensor_truncated(1.0, u, 5.0, &dm), dispersion_tensor(1.0, u, &dm));

        let d = dispersion_tensor_truncated(1.0, [10.0, 0.0], 5.0, &dm);
        assert_abs_diff_eq!(d.xx, 5.1, epsilon = 1e-14);
        assert_abs_diff_eq!(d.yy, 0.15, epsilon = 1e-14);

        for k in [1e-3, 1.0, 1e6] {
            assert_eq!(dispersion_tensor_truncated(0.3, [0.0, 0.0], k, &dm), Sym2::diag(0.3 * 0.1, 0.3 * 0.1));
        }
        assert!(DispersionModel::new(0.1, 1.0, 0.0, None).is_err());
        assert!(DispersionModel::new(0.1, 1.0, 0.1, Some(0.0)).is_err());
    }

    #[test]
    fn sqrt_examples() {
        let r = Sym2::diag(4.0, 9.0).sqrt().unwrap();
        assert_abs_diff_eq!(r.xx, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.yy, 3.0, epsilon = 1e-15);
        assert_eq!(r.xy, 0.0);
        assert_eq!(Sym2::identity().sqrt().unwrap(), Sym2::identity());
        assert_eq!(Sym2::ZERO.sqrt().unwrap(), Sym2::ZERO);
        assert!(matches!(tensor_sqrt([[1.0, 0.5], [0.2, 1.0]]), Err(FieldsError::NotSymmetric(..))));
        assert!(matches!(tensor_sqrt([[1.0, 2.0], [2.0, 1.0]]), Err(FieldsError::Indefinite(_))));
    }

    #[test]
    fn sqrt_matches_eigen_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let a = nalgebra::Matrix2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let spd = a * a.transpose() + nalgebra::Matrix2::identity() * 1e-3;
            let eig = spd.symmetric_eigen();
            let root = eig.eigenvectors * nalgebra::Matrix2::from_diagonal(&eig.eigenvalues.map(f64::sqrt)) * eig.eigenvectors.transpose();
            let s = Sym2::new(spd[(0, 0)], spd[(0, 1)], spd[(1, 1)]);
            let r = s.sqrt().unwrap();
            let scale = spd.norm();
            assert!((r.xx - root[(0, 0)]).abs() <= 1e-10 * scale.sqrt());
            assert!((r.xy - root[(0, 1)]).abs() <= 1e-10 * scale.sqrt());
            assert!((r.yy - root[(1, 1)]).abs() <= 1e-10 * scale.sqrt());
            let sq = r.mul(&r);
            assert!((sq[0][0] - s.xx).abs() <= 1e-12 * scale);
            assert!((sq[0][1] - s.xy).abs() <= 1e-12 * scale);
            assert!((sq[1][1] - s.yy).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn ellipticity_and_growth_sampling() {
        let dm = DispersionModel::new(0.02, 0.5, 0.05, None).unwrap();
        let phi_star = 0.25;
        let alpha = dm.alpha(phi_star);
        let lambda = dm.lambda(phi_star);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let phi = rng.gen_range(phi_star..1.0 / phi_star);
            let scale = 10f64.powf(rng.gen_range(-3.0..3.0));
            let zeta = [rng.gen_range(-1.0..1.0) * scale, rng.gen_range(-1.0..1.0) * scale];
            let xi = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let speed = zeta[0].hypot(zeta[1]);
            let xi2 = xi[0] * xi[0] + xi[1] * xi[1];
            let d = dispersion_tensor(phi, zeta, &dm);
            let q = d.quad(xi);
            assert!(q >= alpha * (1.0 + speed) * xi2 * (1.0 - 1e-12));
            assert!(q <= lambda * (1.0 + speed) * xi2 * (1.0 + 1e-12));
            assert!(d.norm() <= lambda * (1.0 + speed) * (1.0 + 1e-12));
            let k = rng.gen_range(0.01..10.0);
            let dk = dispersion_tensor_truncated(phi, zeta, k, &dm);
            assert!(dk.quad(xi) >= alpha * xi2 * (1.0 - 1e-12));
            assert!(dk.norm() <= lambda * (1.0 + speed) * (1.0 + 1e-12));
            // square-root growth bound
            let root = d.sqrt().unwrap();
            assert!(root.norm() <= lambda.sqrt() * (1.0 + speed.sqrt()) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn continuity_at_origin() {
        let dm = DispersionModel::new(0.1, 1.0, 0.01, None).unwrap();
        let lambda = dm.lambda(1.0);
        let d0 = dispersion_tensor(1.0, [0.0, 0.0], &dm);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let u = [rng.gen_range(-1e-8..1e-8), rng.gen_range(-1e-8..1e-8)];
            let diff = dispersion_tensor(1.0, u, &dm).sub(d0).norm();
            assert!(diff <= lambda * u[0].hypot(u[1]) * (1.0 + 1e-9) + 1e-15);
        }
    }

    #[test]
    fn truncation_converges_on_compact_set() {
        let dm = DispersionModel::new(0.1, 1.0, 0.01, None).unwrap();
        let sup = |k: f64| {
            let mut m: f64 = 0.0;
            for i in 0..=40 {
                for j in 0..=40 {
                    let u = [-5.0 + 0.25 * i as f64, -5.0 + 0.25 * j as f64];
                    let diff = dispersion_tensor_truncated(1.0, u, k, &dm).sub(dispersion_tensor(1.0, u, &dm)).norm();
                    m = m.max(diff);
                }
            }
            m
        };
        let vals: Vec<f64> = [0.5, 1.0, 2.0, 4.0, 8.0].iter().map(|&k| sup(k)).collect();
        for w in vals.windows(2) {
            assert!(w[1] < w[0]);
        }
        // |u| <= 5 sqrt(2) < 8 on the sample set
        assert_eq!(vals[4], 0.0);
    }

    proptest! {
        #[test]
        fn projection_is_rank_one(ux in -100.0f64..100.0, uy in -100.0f64..100.0) {
            prop_assume!(ux.hypot(uy) > 1e-6);
            let e = flow_projection([ux, uy]);
            let e2 = e.mul(&e);
            prop_assert!((e2[0][0] - e.xx).abs() < 1e-12);
            prop_assert!((e2[0][1] - e.xy).abs() < 1e-12);
            prop_assert!((e2[1][1] - e.yy).abs() < 1e-12);
            let eu = e.apply([ux, uy]);
            prop_assert!((eu[0] - ux).abs() <= 1e-12 * ux.abs().max(1.0));
            prop_assert!((eu[1] - uy).abs() <= 1e-12 * uy.abs().max(1.0));
            prop_assert!((e.trace() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn coefficient_validation() {
        let g = Grid::new(2, 2, 1.0, 1.0).unwrap();
        let ok = CoefficientFields::new(&g, vec![0.5; 4], vec![Sym2::diag(1.0, 2.0); 4], 0.5, 0.5);
        assert!(ok.is_ok());
        let bad_phi = CoefficientFields::new(&g, vec![0.5, 0.5, 0.1, 0.5], vec![Sym2::identity(); 4], 0.5, 0.5);
        assert!(matches!(bad_phi, Err(FieldsError::Porosity { cell: 2, .. })));
        let bad_k = CoefficientFields::new(&g, vec![1.0; 4], vec![Sym2::diag(1.0, 3.0); 4], 0.5, 0.5);
        assert!(matches!(bad_k, Err(FieldsError::Permeability { .. })));
        let full = CoefficientFields::new(&g, vec![1.0; 4], vec![Sym2::new(1.0, 0.1, 1.0); 4], 0.5, 0.5);
        assert!(matches!(full, Err(FieldsError::NonDiagonalPermeability { .. })));
        assert!(CoefficientFields::new(&g, vec![1.0; 3], vec![Sym2::identity(); 4], 0.5, 0.5).is_err());
    }
}
