//! Uniform structured 2D cell-centred mesh.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("grid needs at least {min} cells per axis, got {nx}x{ny}")]
    TooFewCells { nx: usize, ny: usize, min: usize },
    #[error("domain extents must be positive and finite, got {lx} x {ly}")]
    BadExtent { lx: f64, ly: f64 },
    #[error("point ({x}, {y}) lies outside the domain [0, {lx}] x [0, {ly}]")]
    OutsideDomain { x: f64, y: f64, lx: f64, ly: f64 },
}

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
        }
    }

    pub fn other(self) -> Axis {
        match self {
            Axis::X => Axis::Y,
            Axis::Y => Axis::X,
        }
    }
}

/// An interior face between two cells. `lo` has the smaller index and the
/// unit normal points from `lo` to `hi` along `axis`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Face {
    pub lo: usize,
    pub hi: usize,
    pub axis: Axis,
    /// Position of this face in the matching `FaceField` component.
    pub slot: usize,
    pub area: f64,
    /// Distance between the two cell centres.
    pub dist: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
    dx: f64,
    dy: f64,
    dim: usize,
}

impl Grid {
    /// Builds an `nx` x `ny` mesh of `[0, lx] x [0, ly]`; both counts must be at least 2.
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self, GridError> {
        if nx < 2 || ny < 2 {
            return Err(GridError::TooFewCells { nx, ny, min: 2 });
        }
        Self::build(nx, ny, lx, ly)
    }

    /// Like [`Grid::new`] but allows a single row or column (at least two
    /// cells in total). Used for hand-checkable assemblies.
    pub fn strip(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self, GridError> {
        if nx == 0 || ny == 0 || nx * ny < 2 {
            return Err(GridError::TooFewCells { nx, ny, min: 1 });
        }
        Self::build(nx, ny, lx, ly)
    }

    fn build(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self, GridError> {
        if !(lx > 0.0 && ly > 0.0 && lx.is_finite() && ly.is_finite()) {
            return Err(GridError::BadExtent { lx, ly });
        }
        Ok(Grid {
            nx,
            ny,
            lx,
            ly,
            dx: lx / nx as f64,
            dy: ly / ny as f64,
            dim: 2,
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn lx(&self) -> f64 {
        self.lx
    }
    pub fn ly(&self) -> f64 {
        self.ly
    }
    pub fn dx(&self) -> f64 {
        self.dx
    }
    pub fn dy(&self) -> f64 {
        self.dy
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }
    /// Largest cell width.
    pub fn h(&self) -> f64 {
        self.dx.max(self.dy)
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx * self.dy
    }

    /// Row-major cell index.
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn ij(&self, cell: usize) -> (usize, usize) {
        (cell % self.nx, cell / self.nx)
    }

    pub fn center(&self, cell: usize) -> Point {
        let (i, j) = self.ij(cell);
        [(i as f64 + 0.5) * self.dx, (j as f64 + 0.5) * self.dy]
    }

    /// Area (length in 2D) of a face normal to `axis`.
    pub fn face_area(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.dy,
            Axis::Y => self.dx,
        }
    }

    /// Centre-to-centre distance across a face normal to `axis`.
    pub fn face_dist(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.dx,
            Axis::Y => self.dy,
        }
    }

    /// Number of faces (boundary included) normal to `axis`.
    pub fn n_faces(&self, axis: Axis) -> usize {
        match axis {
            Axis::X => (self.nx + 1) * self.ny,
            Axis::Y => self.nx * (self.ny + 1),
        }
    }

    /// Slot of the x-face at the left of column `i` (0..=nx) in row `j`.
    pub fn x_face(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    /// Slot of the y-face below row `j` (0..=ny) in column `i`.
    pub fn y_face(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn is_boundary_face(&self, axis: Axis, slot: usize) -> bool {
        match axis {
            Axis::X => {
                let i = slot % (self.nx + 1);
                i == 0 || i == self.nx
            }
            Axis::Y => {
                let j = slot / self.nx;
                j == 0 || j == self.ny
            }
        }
    }

    /// All interior faces: x-faces first, then y-faces, each in slot order.
    pub fn interior_faces(&self) -> Vec<Face> {
        let mut faces = Vec::with_capacity((self.nx - 1) * self.ny + self.nx * (self.ny - 1));
        for j in 0..self.ny {
            for i in 1..self.nx {
                faces.push(Face {
                    lo: self.index(i - 1, j),
                    hi: self.index(i, j),
                    axis: Axis::X,
                    slot: self.x_face(i, j),
                    area: self.dy,
                    dist: self.dx,
                });
            }
        }
        for j in 1..self.ny {
            for i in 0..self.nx {
                faces.push(Face {
                    lo: self.index(i, j - 1),
                    hi: self.index(i, j),
                    axis: Axis::Y,
                    slot: self.y_face(i, j),
                    area: self.dx,
                    dist: self.dy,
                });
            }
        }
        faces
    }

    /// Up to four neighbours of a cell as `(neighbour, axis, sign)` where
    /// `sign` is +1 when the neighbour lies in the positive axis direction.
    pub fn neighbors(&self, cell: usize) -> impl Iterator<Item = (usize, Axis, f64)> + '_ {
        let (i, j) = self.ij(cell);
        let cand = [
            (i > 0).then(|| (self.index(i - 1, j), Axis::X, -1.0)),
            (i + 1 < self.nx).then(|| (self.index(i + 1, j), Axis::X, 1.0)),
            (j > 0).then(|| (self.index(i, j - 1), Axis::Y, -1.0)),
            (j + 1 < self.ny).then(|| (self.index(i, j + 1), Axis::Y, 1.0)),
        ];
        cand.into_iter().flatten()
    }

    /// Cell whose half-open box contains `p`; points on the upper boundary
    /// map to the last cell of that axis.
    pub fn cell_of_point(&self, p: Point) -> Result<usize, GridError> {
        let [x, y] = p;
        let inside = x.is_finite() && y.is_finite() && (0.0..=self.lx).contains(&x) && (0.0..=self.ly).contains(&y);
        if !inside {
            return Err(GridError::OutsideDomain {
                x,
                y,
                lx: self.lx,
                ly: self.ly,
            });
        }
        let i = ((x / self.dx).floor() as usize).min(self.nx - 1);
        let j = ((y / self.dy).floor() as usize).min(self.ny - 1);
        Ok(self.index(i, j))
    }

    pub fn cell_volumes_sum(&self) -> f64 {
        self.cell_volume() * self.n_cells() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn build_examples() {
        let g = Grid::new(2, 2, 1.0, 1.0).unwrap();
        assert_eq!(g.n_cells(), 4);
        assert_eq!(g.cell_volume(), 0.25);

        let g = Grid::new(10, 5, 2.0, 1.0).unwrap();
        assert_eq!(g.n_cells(), 50);
        assert!((g.cell_volume() - 0.04).abs() < 1e-15);

        assert!(matches!(Grid::new(1, 4, 1.0, 1.0), Err(GridError::TooFewCells { .. })));
        assert!(matches!(Grid::new(3, 3, 0.0, 1.0), Err(GridError::BadExtent { .. })));
        assert!(matches!(Grid::new(3, 3, 1.0, -2.0), Err(GridError::BadExtent { .. })));
    }

    #[test]
    fn strip_allows_single_column() {
        let g = Grid::strip(1, 2, 1.0, 2.0).unwrap();
        assert_eq!(g.n_cells(), 2);
        assert_eq!(g.interior_faces().len(), 1);
        assert!(Grid::strip(1, 1, 1.0, 1.0).is_err());
    }

    #[test]
    fn point_location_examples() {
        let g = Grid::new(2, 2, 1.0, 1.0).unwrap();
        assert_eq!(g.cell_of_point([0.1, 0.1]).unwrap(), 0);
        assert_eq!(g.cell_of_point([1.0, 1.0]).unwrap(), 3);
        assert_eq!(g.cell_of_point([0.5, 0.0]).unwrap(), 1);
        assert!(g.cell_of_point([1.5, 0.5]).is_err());
        assert!(g.cell_of_point([f64::NAN, 0.5]).is_err());
    }

    #[test]
    fn volumes_and_faces() {
        let g = Grid::new(7, 3, 1.3, 0.7).unwrap();
        let total: f64 = (0..g.n_cells()).map(|_| g.cell_volume()).sum();
        assert!((total - 1.3 * 0.7).abs() <= 1e-12 * 1.3 * 0.7);
        // cross sections: ny x-faces per column line cover ly, nx y-faces cover lx
        assert!((g.face_area(Axis::X) * g.ny() as f64 - g.ly()).abs() < 1e-14);
        assert!((g.face_area(Axis::Y) * g.nx() as f64 - g.lx()).abs() < 1e-14);
        // perimeter from boundary faces
        let perim = 2.0 * g.ny() as f64 * g.face_area(Axis::X) + 2.0 * g.nx() as f64 * g.face_area(Axis::Y);
        assert!((perim - 2.0 * (1.3 + 0.7)).abs() < 1e-13);

        let faces = g.interior_faces();
        assert_eq!(faces.len(), 6 * 3 + 7 * 2);
        let mut count = vec![0usize; g.n_cells()];
        for f in &faces {
            assert!(f.lo < f.hi);
            assert!(!g.is_boundary_face(f.axis, f.slot));
            count[f.lo] += 1;
            count[f.hi] += 1;
        }
        for c in 0..g.n_cells() {
            assert_eq!(count[c], g.neighbors(c).count());
        }
        let boundary_x = (0..g.n_faces(Axis::X)).filter(|&s| g.is_boundary_face(Axis::X, s)).count();
        let boundary_y = (0..g.n_faces(Axis::Y)).filter(|&s| g.is_boundary_face(Axis::Y, s)).count();
        assert_eq!(boundary_x, 2 * g.ny());
        assert_eq!(boundary_y, 2 * g.nx());
    }

    proptest! {
        #[test]
        fn located_cell_has_nearest_center(x in 0.0f64..1.0, y in 0.0f64..1.0, nx in 2usize..20, ny in 2usize..20) {
            let g = Grid::new(nx, ny, 1.0, 1.0).unwrap();
            let c = g.cell_of_point([x, y]).unwrap();
            let cc = g.center(c);
            // scaled max-norm distance to own centre is <= 1/2 cell
            prop_assert!((x - cc[0]).abs() <= 0.5 * g.dx() + 1e-12);
            prop_assert!((y - cc[1]).abs() <= 0.5 * g.dy() + 1e-12);
            for other in 0..g.n_cells() {
                let oc = g.center(other);
                let d_own = ((x - cc[0]) / g.dx()).abs().max(((y - cc[1]) / g.dy()).abs());
                let d_other = ((x - oc[0]) / g.dx()).abs().max(((y - oc[1]) / g.dy()).abs());
                prop_assert!(d_own <= d_other + 1e-12);
            }
        }
    }
}

/// Per-unit-area normal quantities on faces, stored per normal direction.
/// Slots follow [`Grid::x_face`] and [`Grid::y_face`]; boundary slots are kept
/// so that indexing stays regular.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceField {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl FaceField {
    pub fn zeros(grid: &Grid) -> Self {
        FaceField {
            x: vec![0.0; grid.n_faces(Axis::X)],
            y: vec![0.0; grid.n_faces(Axis::Y)],
        }
    }

    pub fn get(&self, axis: Axis, slot: usize) -> f64 {
        match axis {
            Axis::X => self.x[slot],
            Axis::Y => self.y[slot],
        }
    }

    pub fn set(&mut self, axis: Axis, slot: usize, v: f64) {
        match axis {
            Axis::X => self.x[slot] = v,
            Axis::Y => self.y[slot] = v,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.x.iter().chain(&self.y).fold(0.0f64, |m, v| m.max(v.abs()))
    }
}
