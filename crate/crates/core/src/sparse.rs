//! Compressed sparse row matrices plus the handful of iterative and direct
//! solvers the discrete operators need.

use std::ops::{AddAssign, Mul};

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("{method} did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    NotConverged {
        method: &'static str,
        iterations: usize,
        residual: f64,
    },
    #[error("sparse Cholesky factorization failed: matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

/// Row-compressed sparse matrix. Column indices within a row are sorted and
/// unique.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix<T = f64> {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<T>,
}

impl<T> CsrMatrix<T>
where
    T: Copy + Zero + AddAssign + PartialEq,
{
    /// Builds a matrix from `(row, col, value)` entries, summing duplicates and
    /// dropping entries that cancel to zero.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, T)]) -> Self {
        let mut counts = vec![0usize; nrows + 1];
        for &(r, c, _) in triplets {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
            counts[r + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![T::zero(); triplets.len()];
        let mut fill = counts.clone();
        for &(r, c, v) in triplets {
            let k = fill[r];
            cols[k] = c;
            vals[k] = v;
            fill[r] += 1;
        }

        let mut indptr = Vec::with_capacity(nrows + 1);
        let mut indices = Vec::with_capacity(triplets.len());
        let mut data = Vec::with_capacity(triplets.len());
        indptr.push(0);
        let mut order: Vec<usize> = Vec::new();
        for r in 0..nrows {
            let (lo, hi) = (counts[r], counts[r + 1]);
            order.clear();
            order.extend(lo..hi);
            order.sort_by_key(|&k| cols[k]);
            let mut i = 0;
            while i < order.len() {
                let c = cols[order[i]];
                let mut acc = T::zero();
                while i < order.len() && cols[order[i]] == c {
                    acc += vals[order[i]];
                    i += 1;
                }
                if acc != T::zero() {
                    indices.push(c);
                    data.push(acc);
                }
            }
            indptr.push(indices.len());
        }
        Self {
            nrows,
            ncols,
            indptr,
            indices,
            data,
        }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self::from_triplets(nrows, ncols, &[])
    }

    pub fn transpose(&self) -> Self {
        let mut trip = Vec::with_capacity(self.nnz());
        for (r, c, v) in self.iter() {
            trip.push((c, r, v));
        }
        Self::from_triplets(self.ncols, self.nrows, &trip)
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        let (cols, vals) = self.row(row);
        match cols.binary_search(&col) {
            Ok(k) => vals[k],
            Err(_) => T::zero(),
        }
    }
}

impl<T: Copy> CsrMatrix<T> {
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn row(&self, r: usize) -> (&[usize], &[T]) {
        let (lo, hi) = (self.indptr[r], self.indptr[r + 1]);
        (&self.indices[lo..hi], &self.data[lo..hi])
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.nrows).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
        })
    }

    pub fn map<U, F>(&self, f: F) -> CsrMatrix<U>
    where
        F: Fn(T) -> U,
    {
        CsrMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            indptr: self.indptr.clone(),
            indices: self.indices.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }
}

impl<T> CsrMatrix<T>
where
    T: Copy + Zero + AddAssign + Mul<Output = T>,
{
    /// `y = A x`
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|r| {
                let (cols, vals) = self.row(r);
                let mut acc = T::zero();
                for (&c, &v) in cols.iter().zip(vals) {
                    acc += v * x[c];
                }
                acc
            })
            .collect()
    }

    /// `y = Aᵀ x`
    pub fn tr_mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.nrows);
        let mut y = vec![T::zero(); self.ncols];
        for r in 0..self.nrows {
            let xr = x[r];
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                y[c] += v * xr;
            }
        }
        y
    }
}

impl CsrMatrix<f64> {
    pub fn identity(n: usize) -> Self {
        let trip: Vec<_> = (0..n).map(|i| (i, i, 1.0)).collect();
        Self::from_triplets(n, n, &trip)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    /// Sparse product `self · other`.
    pub fn matmul(&self, other: &CsrMatrix<f64>) -> CsrMatrix<f64> {
        assert_eq!(self.ncols, other.nrows);
        let mut trip = Vec::new();
        let mut acc = vec![0.0; other.ncols];
        let mut touched: Vec<usize> = Vec::new();
        let mut mark = vec![false; other.ncols];
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (&k, &a) in cols.iter().zip(vals) {
                let (ocols, ovals) = other.row(k);
                for (&c, &b) in ocols.iter().zip(ovals) {
                    if !mark[c] {
                        mark[c] = true;
                        touched.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            for &c in &touched {
                trip.push((r, c, acc[c]));
                acc[c] = 0.0;
                mark[c] = false;
            }
            touched.clear();
        }
        CsrMatrix::from_triplets(self.nrows, other.ncols, &trip)
    }

    /// `Aᵀ · B · A` for a square `B`.
    pub fn congruence(&self, b: &CsrMatrix<f64>) -> CsrMatrix<f64> {
        self.transpose().matmul(&b.matmul(self))
    }

    /// `self + s · other`
    pub fn add_scaled(&self, other: &CsrMatrix<f64>, s: f64) -> CsrMatrix<f64> {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut trip: Vec<_> = self.iter().collect();
        trip.extend(other.iter().map(|(r, c, v)| (r, c, s * v)));
        CsrMatrix::from_triplets(self.nrows, self.ncols, &trip)
    }

    /// Quadratic form `xᵀ A y`.
    pub fn form(&self, x: &[f64], y: &[f64]) -> f64 {
        dot(x, &self.mul_vec(y))
    }

    /// Drops the listed rows and columns of a square matrix.
    pub fn principal_submatrix(&self, keep: &[bool]) -> (CsrMatrix<f64>, Vec<usize>) {
        let mut new_index = vec![usize::MAX; self.nrows];
        let mut kept = Vec::new();
        for (i, &k) in keep.iter().enumerate() {
            if k {
                new_index[i] = kept.len();
                kept.push(i);
            }
        }
        let trip: Vec<_> = self
            .iter()
            .filter(|&(r, c, _)| keep[r] && keep[c])
            .map(|(r, c, v)| (new_index[r], new_index[c], v))
            .collect();
        (CsrMatrix::from_triplets(kept.len(), kept.len(), &trip), kept)
    }

    /// Symmetry defect `max |A_ij − A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        self.iter()
            .map(|(r, c, v)| (v - self.get(c, r)).abs())
            .fold(0.0, f64::max)
    }

    /// Coordinate-format text dump: one `row col value` line per entry.
    pub fn to_coordinate_text(&self) -> String {
        let mut out = format!("% {} {} {}\n", self.nrows, self.ncols, self.nnz());
        for (r, c, v) in self.iter() {
            out.push_str(&format!("{r} {c} {v:?}\n"));
        }
        out
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// `y += s x`
pub fn axpy(y: &mut [f64], s: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

/// Sparse LLᵀ factorization of a symmetric positive definite matrix.
pub struct SparseCholesky {
    n: usize,
    llt: faer::sparse::linalg::solvers::Llt<usize, f64>,
}

impl SparseCholesky {
    pub fn new(a: &CsrMatrix<f64>) -> Result<Self, SolveError> {
        if a.nrows() != a.ncols() {
            return Err(SolveError::Dimension {
                expected: a.nrows(),
                got: a.ncols(),
            });
        }
        let trip: Vec<_> = a
            .iter()
            .filter(|&(r, c, _)| r >= c)
            .map(|(r, c, v)| Triplet::new(r, c, v))
            .collect();
        let mat = SparseColMat::<usize, f64>::try_new_from_triplets(a.nrows(), a.ncols(), &trip)
            .map_err(|_| SolveError::NotPositiveDefinite)?;
        let llt = mat
            .sp_cholesky(Side::Lower)
            .map_err(|_| SolveError::NotPositiveDefinite)?;
        Ok(Self { n: a.nrows(), llt })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let rhs = Mat::<f64>::from_fn(self.n, 1, |i, _| b[i]);
        let x = self.llt.solve(&rhs);
        (0..self.n).map(|i| x[(i, 0)]).collect()
    }

    /// Solves for several right-hand sides at once.
    pub fn solve_many(&self, bs: &[Vec<f64>]) -> Vec<Vec<f64>> {
        if bs.is_empty() {
            return Vec::new();
        }
        let rhs = Mat::<f64>::from_fn(self.n, bs.len(), |i, j| bs[j][i]);
        let x = self.llt.solve(&rhs);
        (0..bs.len())
            .map(|j| (0..self.n).map(|i| x[(i, j)]).collect())
            .collect()
    }
}

/// Outcome of an iterative solve.
#[derive(Clone, Debug)]
pub struct IterativeSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Conjugate gradients for a symmetric positive (semi)definite operator.
/// Consistent singular systems converge to the solution with no component in
/// the kernel when started from zero.
pub fn conjugate_gradient<A>(
    apply: A,
    b: &[f64],
    precond: Option<&[f64]>,
    tol: f64,
    max_iter: usize,
) -> Result<IterativeSolution, SolveError>
where
    A: Fn(&[f64]) -> Vec<f64>,
{
    let n = b.len();
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        return Ok(IterativeSolution {
            x: vec![0.0; n],
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let inv_diag: Option<Vec<f64>> = precond.map(|d| {
        d.iter()
            .map(|&v| if v.abs() > 0.0 { 1.0 / v } else { 1.0 })
            .collect()
    });
    let apply_prec = |r: &[f64]| -> Vec<f64> {
        match &inv_diag {
            Some(d) => r.iter().zip(d).map(|(a, b)| a * b).collect(),
            None => r.to_vec(),
        }
    };
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z = apply_prec(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut rel = 1.0;
    for it in 1..=max_iter {
        let ap = apply(&p);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            // Direction in the kernel: the remaining residual is not reachable.
            rel = norm2(&r) / bnorm;
            if rel <= tol {
                return Ok(IterativeSolution {
                    x,
                    iterations: it,
                    relative_residual: rel,
                });
            }
            return Err(SolveError::NotConverged {
                method: "CG",
                iterations: it,
                residual: rel,
            });
        }
        let alpha = rz / pap;
        axpy(&mut x, alpha, &p);
        axpy(&mut r, -alpha, &ap);
        rel = norm2(&r) / bnorm;
        if rel <= tol {
            return Ok(IterativeSolution {
                x,
                iterations: it,
                relative_residual: rel,
            });
        }
        z = apply_prec(&r);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    Err(SolveError::NotConverged {
        method: "CG",
        iterations: max_iter,
        residual: rel,
    })
}

/// MINRES for an operator `A` that is self-adjoint with respect to the inner
/// product `⟨u, v⟩ = uᵀ W v`. `precond_inv` applies `W⁻¹`, so the iteration
/// runs on `W⁻¹ A x = W⁻¹ b`; started from zero on a consistent singular
/// system it returns the `W`-minimum-norm solution.
pub fn minres<A, P>(
    apply: A,
    precond_inv: P,
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<IterativeSolution, SolveError>
where
    A: Fn(&[f64]) -> Vec<f64>,
    P: Fn(&[f64]) -> Vec<f64>,
{
    // Preconditioned MINRES (Paige–Saunders), with the preconditioner being
    // the Gram matrix of the inner product.
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut r1 = b.to_vec();
    let mut y = precond_inv(&r1);
    let beta1 = dot(&r1, &y);
    if beta1 <= 0.0 {
        return Ok(IterativeSolution {
            x,
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let beta1 = beta1.sqrt();
    let mut r2 = r1.clone();
    let mut oldb = 0.0;
    let mut beta = beta1;
    let mut dbar = 0.0;
    let mut epsln = 0.0;
    let mut phibar = beta1;
    let mut cs = -1.0;
    let mut sn = 0.0;
    let mut w = vec![0.0; n];
    let mut w2 = vec![0.0; n];
    let mut rel = 1.0;
    for it in 1..=max_iter {
        let s = 1.0 / beta;
        let v: Vec<f64> = y.iter().map(|yi| s * yi).collect();
        let mut yv = apply(&v);
        if it >= 2 {
            axpy(&mut yv, -beta / oldb, &r1);
        }
        let alfa = dot(&v, &yv);
        axpy(&mut yv, -alfa / beta, &r2);
        r1 = std::mem::replace(&mut r2, yv);
        y = precond_inv(&r2);
        oldb = beta;
        let b2 = dot(&r2, &y);
        beta = if b2 > 0.0 { b2.sqrt() } else { 0.0 };

        let oldeps = epsln;
        let delta = cs * dbar + sn * alfa;
        let gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        let gamma = (gbar * gbar + beta * beta).sqrt().max(f64::MIN_POSITIVE);
        cs = gbar / gamma;
        sn = beta / gamma;
        let phi = cs * phibar;
        phibar *= sn;

        let denom = 1.0 / gamma;
        let w1 = std::mem::replace(&mut w2, w.clone());
        for i in 0..n {
            w[i] = (v[i] - oldeps * w1[i] - delta * w2[i]) * denom;
            x[i] += phi * w[i];
        }
        rel = phibar.abs() / beta1;
        if rel <= tol || beta == 0.0 {
            return Ok(IterativeSolution {
                x,
                iterations: it,
                relative_residual: rel,
            });
        }
    }
    Err(SolveError::NotConverged {
        method: "MINRES",
        iterations: max_iter,
        residual: rel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, n, &t)
    }

    #[test]
    fn triplets_sum_duplicates_and_drop_zeros() {
        let m = CsrMatrix::from_triplets(2, 2, &[(0, 1, 2.0), (0, 1, -2.0), (1, 0, 1.0), (1, 0, 1.5)]);
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(1, 0), 2.5);
        assert_eq!(m.get(0, 1), 0.0);
    }

    #[test]
    fn matmul_matches_dense() {
        let a = CsrMatrix::from_triplets(2, 3, &[(0, 0, 1.0), (0, 2, 2.0), (1, 1, 3.0)]);
        let b = CsrMatrix::from_triplets(3, 2, &[(0, 0, 1.0), (1, 1, 1.0), (2, 0, 4.0), (2, 1, -1.0)]);
        let c = a.matmul(&b);
        assert_eq!(c.get(0, 0), 9.0);
        assert_eq!(c.get(0, 1), -2.0);
        assert_eq!(c.get(1, 1), 3.0);
        assert_eq!(c.get(1, 0), 0.0);
    }

    #[test]
    fn cholesky_and_cg_agree() {
        let a = laplacian_1d(50);
        let b: Vec<f64> = (0..50).map(|i| (i as f64).sin()).collect();
        let x = SparseCholesky::new(&a).unwrap().solve(&b);
        let cg = conjugate_gradient(|v| a.mul_vec(v), &b, None, 1e-12, 500).unwrap();
        for (p, q) in x.iter().zip(&cg.x) {
            assert!((p - q).abs() < 1e-8);
        }
    }

    #[test]
    fn minres_solves_indefinite_system() {
        let mut a = laplacian_1d(30);
        a = a.add_scaled(&CsrMatrix::identity(30), -1.0);
        let b: Vec<f64> = (0..30).map(|i| 1.0 + i as f64).collect();
        let sol = minres(|v| a.mul_vec(v), |v| v.to_vec(), &b, 1e-12, 400).unwrap();
        let r = a.mul_vec(&sol.x);
        for (ri, bi) in r.iter().zip(&b) {
            assert!((ri - bi).abs() < 1e-7, "{ri} vs {bi}");
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, -1.0)]);
        assert!(SparseCholesky::new(&a).is_err());
    }
}
