//! Compressed-row sparse matrices and Jacobi-preconditioned Krylov solvers.

use crate::par;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: matrix is {rows}x{cols}, vector has {len} entries")]
    DimensionMismatch { rows: usize, cols: usize, len: usize },
    #[error("solver did not converge in {iterations} iterations (relative residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("solver breakdown at iteration {iteration} (relative residual {residual:.3e})")]
    Breakdown { iteration: usize, residual: f64 },
    #[error("zero or non-finite diagonal entry in row {0}")]
    BadDiagonal(usize),
}

/// Square CSR matrix. Column indices are sorted and unique within each row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col: Vec<usize>,
    val: Vec<f64>,
    symmetric: bool,
}

impl CsrMatrix {
    /// Assembles from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(r, c, v) in triplets {
            assert!(r < n && c < n, "triplet ({r}, {c}) outside {n}x{n}");
            rows[r].push((c, v));
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col = Vec::with_capacity(triplets.len());
        let mut val = Vec::with_capacity(triplets.len());
        row_ptr.push(0);
        for mut entries in rows {
            entries.sort_by_key(|e| e.0);
            let mut last: Option<usize> = None;
            for (c, v) in entries {
                if last == Some(c) {
                    *val.last_mut().unwrap() += v;
                } else {
                    col.push(c);
                    val.push(v);
                    last = Some(c);
                }
            }
            row_ptr.push(col.len());
        }
        CsrMatrix { n, row_ptr, col, val, symmetric: false }
    }

    pub fn identity(n: usize) -> Self {
        let t: Vec<_> = (0..n).map(|i| (i, i, 1.0)).collect();
        Self::from_triplets(n, &t).flagged_symmetric()
    }

    pub fn from_dense(a: &[Vec<f64>]) -> Self {
        let n = a.len();
        let mut t = Vec::new();
        for (i, row) in a.iter().enumerate() {
            assert_eq!(row.len(), n);
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    t.push((i, j, v));
                }
            }
        }
        Self::from_triplets(n, &t)
    }

    /// Marks the matrix as (structurally and numerically) symmetric.
    pub fn flagged_symmetric(mut self) -> Self {
        self.symmetric = true;
        self
    }

    pub fn is_flagged_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.val.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col[r.clone()].iter().copied().zip(self.val[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        d
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(_, v)| v).sum()).collect()
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                m = m.max((v - self.get(j, i)).abs());
            }
        }
        m
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        par::fill_indexed(y, |i| {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.val[k] * x[self.col[k]];
            }
            s
        });
    }

    fn check_len(&self, len: usize) -> Result<(), LinalgError> {
        if len != self.n {
            return Err(LinalgError::DimensionMismatch { rows: self.n, cols: self.n, len });
        }
        Ok(())
    }
}

/// Sparse matrix-vector product.
pub fn spmv(a: &CsrMatrix, x: &[f64]) -> Result<Vec<f64>, LinalgError> {
    a.check_len(x.len())?;
    let mut y = vec![0.0; a.n];
    a.apply_into(x, &mut y);
    Ok(y)
}

/// `||b - A x|| / ||b||`, or `||A x||` when `b = 0`.
pub fn relative_residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> Result<f64, LinalgError> {
    let ax = spmv(a, x)?;
    let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let nb = par::norm2(b);
    let nr = par::norm2(&r);
    Ok(if nb > 0.0 { nr / nb } else { nr })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    /// Relative residual recomputed from the returned solution.
    pub residual: f64,
}

fn jacobi(a: &CsrMatrix) -> Result<Vec<f64>, LinalgError> {
    a.diagonal()
        .into_iter()
        .enumerate()
        .map(|(i, d)| if d != 0.0 && d.is_finite() { Ok(1.0 / d) } else { Err(LinalgError::BadDiagonal(i)) })
        .collect()
}

fn remove_mean(v: &mut [f64]) {
    let m = par::sum(v) / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= m);
}

/// Preconditioned conjugate gradients for symmetric positive semi-definite
/// systems. With `nullspace` set, the constant vector is treated as the
/// kernel: `b` is projected to zero mean and iterates stay mean-zero.
pub fn solve_cg(a: &CsrMatrix, b: &[f64], tol: f64, maxit: usize, nullspace: bool) -> Result<(Vec<f64>, SolveStats), LinalgError> {
    a.check_len(b.len())?;
    let n = a.n;
    let mut rhs = b.to_vec();
    if nullspace {
        remove_mean(&mut rhs);
    }
    let nb = par::norm2(&rhs);
    let mut x = vec![0.0; n];
    if nb == 0.0 {
        return Ok((x, SolveStats { iterations: 0, residual: 0.0 }));
    }
    let inv_diag = jacobi(a)?;
    let mut iterations = 0;
    let mut ap = vec![0.0; n];
    // restart loop: the recursive residual can drift from the true one
    loop {
        let mut r = rhs.clone();
        a.apply_into(&x, &mut ap);
        par::axpy(-1.0, &ap, &mut r);
        if par::norm2(&r) <= tol * nb {
            break;
        }
        let precondition = |r: &[f64]| {
            let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
            if nullspace {
                remove_mean(&mut z);
            }
            z
        };
        let mut z = precondition(&r);
        let mut p = z.clone();
        let mut rz = par::dot(&r, &z);
        let start = iterations;
        while iterations < maxit {
            iterations += 1;
            a.apply_into(&p, &mut ap);
            let pap = par::dot(&p, &ap);
            if pap <= 0.0 || !pap.is_finite() {
                return Err(LinalgError::Breakdown { iteration: iterations, residual: par::norm2(&r) / nb });
            }
            let alpha = rz / pap;
            par::axpy(alpha, &p, &mut x);
            par::axpy(-alpha, &ap, &mut r);
            if par::norm2(&r) <= 0.1 * tol * nb {
                break;
            }
            z = precondition(&r);
            let rz_new = par::dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            par::xpby(&z, beta, &mut p);
        }
        if iterations >= maxit || iterations == start {
            break;
        }
    }
    if nullspace {
        remove_mean(&mut x);
    }
    let residual = relative_residual(a, &x, &rhs)?;
    if residual > tol {
        return Err(LinalgError::NotConverged { iterations, residual });
    }
    Ok((x, SolveStats { iterations, residual }))
}

/// Jacobi right-preconditioned BiCGStab for general nonsingular systems.
pub fn solve_bicgstab(a: &CsrMatrix, b: &[f64], tol: f64, maxit: usize) -> Result<(Vec<f64>, SolveStats), LinalgError> {
    solve_bicgstab_from(a, b, vec![0.0; b.len()], tol, maxit)
}

/// As [`solve_bicgstab`], starting from `x0`. A start that already meets
/// the tolerance is returned unchanged.
pub fn solve_bicgstab_from(a: &CsrMatrix, b: &[f64], x0: Vec<f64>, tol: f64, maxit: usize) -> Result<(Vec<f64>, SolveStats), LinalgError> {
    a.check_len(b.len())?;
    a.check_len(x0.len())?;
    let n = a.n;
    let nb = par::norm2(b);
    let mut x = x0;
    if nb == 0.0 {
        x.iter_mut().for_each(|e| *e = 0.0);
        return Ok((x, SolveStats { iterations: 0, residual: 0.0 }));
    }
    let inv_diag = jacobi(a)?;
    let precondition = |v: &[f64]| -> Vec<f64> { v.iter().zip(&inv_diag).map(|(vi, di)| vi * di).collect() };
    let mut iterations = 0;
    let mut v = vec![0.0; n];
    let mut t = vec![0.0; n];
    loop {
        let mut r = b.to_vec();
        a.apply_into(&x, &mut v);
        par::axpy(-1.0, &v, &mut r);
        if par::norm2(&r) <= tol * nb {
            break;
        }
        let start = iterations;
        let r_hat = r.clone();
        let mut rho = 1.0;
        let mut alpha = 1.0;
        let mut omega = 1.0;
        let mut p = vec![0.0; n];
        v.iter_mut().for_each(|e| *e = 0.0);
        while iterations < maxit {
            iterations += 1;
            let rho_new = par::dot(&r_hat, &r);
            if rho_new == 0.0 || !rho_new.is_finite() {
                return Err(LinalgError::Breakdown { iteration: iterations, residual: par::norm2(&r) / nb });
            }
            let beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            // p = r + beta (p - omega v)
            for ((pi, ri), vi) in p.iter_mut().zip(&r).zip(&v) {
                *pi = ri + beta * (*pi - omega * vi);
            }
            let p_hat = precondition(&p);
            a.apply_into(&p_hat, &mut v);
            let rv = par::dot(&r_hat, &v);
            if rv == 0.0 || !rv.is_finite() {
                return Err(LinalgError::Breakdown { iteration: iterations, residual: par::norm2(&r) / nb });
            }
            alpha = rho / rv;
            let mut s = r.clone();
            par::axpy(-alpha, &v, &mut s);
            par::axpy(alpha, &p_hat, &mut x);
            if par::norm2(&s) <= 0.1 * tol * nb {
                r = s;
                break;
            }
            let s_hat = precondition(&s);
            a.apply_into(&s_hat, &mut t);
            let tt = par::dot(&t, &t);
            if tt == 0.0 {
                return Err(LinalgError::Breakdown { iteration: iterations, residual: par::norm2(&s) / nb });
            }
            omega = par::dot(&t, &s) / tt;
            par::axpy(omega, &s_hat, &mut x);
            r = s;
            par::axpy(-omega, &t, &mut r);
            if par::norm2(&r) <= 0.1 * tol * nb {
                break;
            }
            if omega == 0.0 {
                return Err(LinalgError::Breakdown { iteration: iterations, residual: par::norm2(&r) / nb });
            }
        }
        if iterations >= maxit || iterations == start {
            break;
        }
    }
    let residual = relative_residual(a, &x, b)?;
    if residual > tol {
        return Err(LinalgError::NotConverged { iterations, residual });
    }
    Ok((x, SolveStats { iterations, residual }))
}

/// Standard 5-point Neumann Laplacian (unit spacing) on an `nx` x `ny` grid.
pub fn neumann_laplacian(nx: usize, ny: usize) -> CsrMatrix {
    let idx = |i: usize, j: usize| j * nx + i;
    let mut t = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let me = idx(i, j);
            let mut nbrs = Vec::new();
            if i > 0 {
                nbrs.push(idx(i - 1, j));
            }
            if i + 1 < nx {
                nbrs.push(idx(i + 1, j));
            }
            if j > 0 {
                nbrs.push(idx(i, j - 1));
            }
            if j + 1 < ny {
                nbrs.push(idx(i, j + 1));
            }
            t.push((me, me, nbrs.len() as f64));
            for nb in nbrs {
                t.push((me, nb, -1.0));
            }
        }
    }
    CsrMatrix::from_triplets(nx * ny, &t).flagged_symmetric()
}
