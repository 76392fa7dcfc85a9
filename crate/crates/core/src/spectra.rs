//! Smallest nonzero eigenvalues of the up-Laplacian pencil on 1-cochains,
//! `(d₁ᵀ M₂ d₁) u = λ M₁ u`, and of the function pencil `(d₀ᵀ M₁ d₀) f = λ M₀ f`.
//!
//! Large problems use a block Krylov method on the shift-inverted operator
//! `(K + τM)⁻¹ M`, restricted to the `M`-orthogonal complement of the exact
//! cochains, with Rayleigh–Ritz on `(K, M)` and locking of kernel modes.
//! Small problems are solved densely.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dec::{DecError, MetricData};
use crate::sparse::{dot, CsrMatrix, SolveError, SparseCholesky};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error(transparent)]
    Dec(#[from] DecError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("requested count must be at least 1")]
    EmptyRequest,
    #[error("operation needs a closed orientable 3-manifold")]
    NotClosed,
    #[error("eigensolver did not reach tolerance {tol:.1e} after {retries} attempts (worst residual {residual:.3e})")]
    NotConverged { tol: f64, retries: usize, residual: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectralOptions {
    /// Residual tolerance in the `M⁻¹` norm for `M`-normalized eigenforms.
    pub tol: f64,
    /// Eigenvalues below `zero_factor · trace(K)/trace(M)` count as kernel.
    pub zero_factor: f64,
    pub seed: u64,
    pub max_restarts: usize,
    pub retries: usize,
    /// Problems up to this size are solved with a dense eigensolver.
    pub dense_limit: usize,
    /// Extra block columns beyond the requested count.
    pub block_margin: usize,
    pub krylov_steps: usize,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            zero_factor: 1e-10,
            seed: 0x5eed,
            max_restarts: 40,
            retries: 3,
            dense_limit: 1200,
            block_margin: 16,
            krylov_steps: 4,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectralResult {
    pub eigenvalues: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub eigenforms: Vec<Vec<f64>>,
    /// `‖K u − λ M u‖_{M⁻¹}` with `‖u‖_M = 1`.
    pub residuals: Vec<f64>,
    pub zero_threshold: f64,
    /// Dimension of the kernel identified (deflated plus locked modes).
    pub kernel_dimension: usize,
    /// Fewer nonzero eigenvalues exist than were requested.
    pub truncated: bool,
    pub restarts: usize,
    pub seed: u64,
}

impl SpectralResult {
    pub fn first(&self) -> Option<f64> {
        self.eigenvalues.first().copied()
    }

    pub fn without_forms(mut self) -> Self {
        self.eigenforms.clear();
        self
    }
}

/// Projector onto the `M`-orthogonal complement of `range(D)`, with one
/// column of `D` dropped per connected component to make `Dᵀ M D` definite.
struct ExactProjector {
    d: CsrMatrix,
    chol: SparseCholesky,
}

impl ExactProjector {
    fn new(m: &MetricData) -> Result<Self, SpectraError> {
        let d0 = m.d(0);
        let (labels, ncomp) = m.complex().components();
        let mut pinned = vec![false; ncomp];
        let mut keep = vec![true; d0.ncols()];
        for (v, &c) in labels.iter().enumerate() {
            if !pinned[c] {
                pinned[c] = true;
                keep[v] = false;
            }
        }
        let kept: Vec<usize> = (0..d0.ncols()).filter(|&v| keep[v]).collect();
        let mut col = vec![usize::MAX; d0.ncols()];
        for (k, &v) in kept.iter().enumerate() {
            col[v] = k;
        }
        let trip: Vec<_> = d0
            .iter()
            .filter(|&(_, c, _)| keep[c])
            .map(|(r, c, v)| (r, col[c], v))
            .collect();
        let d = CsrMatrix::from_triplets(d0.nrows(), kept.len(), &trip);
        let chol = SparseCholesky::new(&d.congruence(m.mass(1)))?;
        Ok(Self { d, chol })
    }

    fn rank(&self) -> usize {
        self.d.ncols()
    }

    /// `x ← x − D (Dᵀ M D)⁻¹ Dᵀ (M x)`, given `mx = M x`.
    fn apply(&self, x: &mut [f64], mx: &[f64]) {
        let y = self.chol.solve(&self.d.tr_mul_vec(mx));
        let dy = self.d.mul_vec(&y);
        for (xi, di) in x.iter_mut().zip(dy) {
            *xi -= di;
        }
    }
}

struct Pencil<'a> {
    k: CsrMatrix,
    m: &'a CsrMatrix,
    m_chol: &'a SparseCholesky,
    exact: Option<ExactProjector>,
}

impl Pencil<'_> {
    fn scale(&self) -> f64 {
        let tk: f64 = self.k.diagonal().iter().sum();
        let tm: f64 = self.m.diagonal().iter().sum();
        tk / tm
    }

    fn residual(&self, lambda: f64, u: &[f64]) -> f64 {
        let ku = self.k.mul_vec(u);
        let mu = self.m.mul_vec(u);
        let r: Vec<f64> = ku.iter().zip(&mu).map(|(a, b)| a - lambda * b).collect();
        dot(&r, &self.m_chol.solve(&r)).max(0.0).sqrt()
    }
}

/// An `M`-orthonormal set stored with the products `M v`.
#[derive(Default)]
struct MBasis {
    v: Vec<Vec<f64>>,
    mv: Vec<Vec<f64>>,
}

impl MBasis {
    fn orthogonalize(&self, x: &mut [f64]) {
        for _ in 0..2 {
            for (v, mv) in self.v.iter().zip(&self.mv) {
                let c = dot(x, mv);
                for (xi, vi) in x.iter_mut().zip(v) {
                    *xi -= c * vi;
                }
            }
        }
    }

    /// Adds `x` after orthogonalization; returns false if it was dependent.
    fn push(&mut self, m: &CsrMatrix, mut x: Vec<f64>, locked: &MBasis) -> bool {
        let before = dot(&x, &m.mul_vec(&x)).max(0.0).sqrt();
        if before == 0.0 {
            return false;
        }
        locked.orthogonalize(&mut x);
        self.orthogonalize(&mut x);
        let mx = m.mul_vec(&x);
        let n = dot(&x, &mx).max(0.0).sqrt();
        if n <= 1e-10 * before {
            return false;
        }
        self.v.push(x.iter().map(|v| v / n).collect());
        self.mv.push(mx.iter().map(|v| v / n).collect());
        true
    }

    fn len(&self) -> usize {
        self.v.len()
    }
}

fn deflate(p: &Pencil, x: &mut [f64]) {
    if let Some(ex) = &p.exact {
        let mx = p.m.mul_vec(x);
        ex.apply(x, &mx);
    }
}

struct Ritz {
    values: Vec<f64>,
    vectors: Vec<Vec<f64>>,
}

fn rayleigh_ritz(p: &Pencil, basis: &MBasis) -> Ritz {
    let n = basis.len();
    let kv: Vec<Vec<f64>> = basis.v.iter().map(|v| p.k.mul_vec(v)).collect();
    let h = DMatrix::from_fn(n, n, |i, j| 0.5 * (dot(&basis.v[i], &kv[j]) + dot(&basis.v[j], &kv[i])));
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let dim = basis.v[0].len();
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| {
            let mut u = vec![0.0; dim];
            for (j, v) in basis.v.iter().enumerate() {
                let c = eig.eigenvectors[(j, i)];
                for (ui, vi) in u.iter_mut().zip(v) {
                    *ui += c * vi;
                }
            }
            u
        })
        .collect();
    Ritz { values, vectors }
}

fn krylov_attempt(
    p: &Pencil,
    count: usize,
    opts: &SpectralOptions,
    seed: u64,
) -> Result<SpectralResult, SpectraError> {
    let n = p.m.nrows();
    let scale = p.scale();
    let zero_threshold = opts.zero_factor * scale;
    let tau = 1e-4 * scale;
    let a = p.k.add_scaled(p.m, tau);
    let a_chol = SparseCholesky::new(&a)?;
    let block = count + opts.block_margin;
    let deflated_rank = p.exact.as_ref().map_or(0, ExactProjector::rank);
    let available = n.saturating_sub(deflated_rank);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut locked = MBasis::default();
    let mut start: Vec<Vec<f64>> = (0..block)
        .map(|_| (0..n).map(|_| rng.random::<f64>() - 0.5).collect())
        .collect();
    let mut best = None;
    for restart in 0..opts.max_restarts {
        let mut basis = MBasis::default();
        let mut current = Vec::new();
        for mut x in start.drain(..) {
            deflate(p, &mut x);
            if basis.push(p.m, x, &locked) {
                current.push(basis.len() - 1);
            }
        }
        for _ in 0..opts.krylov_steps {
            let rhs: Vec<Vec<f64>> = current.iter().map(|&i| basis.mv[i].clone()).collect();
            let images = a_chol.solve_many(&rhs);
            current.clear();
            for mut y in images {
                deflate(p, &mut y);
                if basis.push(p.m, y, &locked) {
                    current.push(basis.len() - 1);
                }
            }
            if current.is_empty() {
                break;
            }
        }
        if basis.len() == 0 {
            break;
        }
        let ritz = rayleigh_ritz(p, &basis);
        let mut nonzero = Vec::new();
        for (theta, u) in ritz.values.iter().zip(ritz.vectors) {
            if *theta < zero_threshold {
                let mut x = u;
                locked.orthogonalize(&mut x);
                let mx = p.m.mul_vec(&x);
                let nn = dot(&x, &mx).sqrt();
                if nn > 1e-6 {
                    locked.v.push(x.iter().map(|v| v / nn).collect());
                    locked.mv.push(mx.iter().map(|v| v / nn).collect());
                }
            } else {
                nonzero.push((*theta, u));
            }
        }
        let take = count.min(nonzero.len());
        let residuals: Vec<f64> = nonzero[..take]
            .iter()
            .map(|(l, u)| p.residual(*l, u))
            .collect();
        let worst = residuals.iter().copied().fold(0.0, f64::max);
        let truncated = count > available.saturating_sub(locked.len());
        let result = SpectralResult {
            eigenvalues: nonzero[..take].iter().map(|x| x.0).collect(),
            eigenforms: nonzero[..take].iter().map(|x| x.1.clone()).collect(),
            residuals,
            zero_threshold,
            kernel_dimension: deflated_rank + locked.len(),
            truncated,
            restarts: restart + 1,
            seed,
        };
        if (take == count || truncated) && worst <= opts.tol {
            return Ok(result);
        }
        best = Some((worst, result));
        start = nonzero.into_iter().take(block).map(|x| x.1).collect();
        while start.len() < block {
            start.push((0..n).map(|_| rng.random::<f64>() - 0.5).collect());
        }
    }
    let residual = best.map_or(f64::INFINITY, |b| b.0);
    Err(SpectraError::NotConverged {
        tol: opts.tol,
        retries: 1,
        residual,
    })
}

fn dense(m: &CsrMatrix) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(m.nrows(), m.ncols());
    for (r, c, v) in m.iter() {
        d[(r, c)] = v;
    }
    d
}

/// Full generalized eigendecomposition of `(K, M)` through `M = LLᵀ`.
/// Returns ascending eigenvalues and `M`-orthonormal eigenvectors.
pub fn dense_pencil(k: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<(Vec<f64>, Vec<Vec<f64>>), SpectraError> {
    let chol = nalgebra::Cholesky::new(m.clone()).ok_or(SolveError::NotPositiveDefinite)?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or(SolveError::NotPositiveDefinite)?;
    let c = &linv * k * linv.transpose();
    let c = 0.5 * (&c + c.transpose());
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vecs = linv.transpose() * &eig.eigenvectors;
    Ok((
        order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        order
            .iter()
            .map(|&i| vecs.column(i).iter().copied().collect())
            .collect(),
    ))
}

fn dense_solve(p: &Pencil, count: usize, opts: &SpectralOptions) -> Result<SpectralResult, SpectraError> {
    let zero_threshold = opts.zero_factor * p.scale();
    let (vals, vecs) = dense_pencil(&dense(&p.k), &dense(p.m))?;
    let kernel = vals.iter().filter(|&&v| v < zero_threshold).count();
    let pairs: Vec<(f64, Vec<f64>)> = vals
        .into_iter()
        .zip(vecs)
        .filter(|(v, _)| *v >= zero_threshold)
        .take(count)
        .collect();
    let residuals = pairs.iter().map(|(l, u)| p.residual(*l, u)).collect();
    Ok(SpectralResult {
        truncated: pairs.len() < count,
        eigenvalues: pairs.iter().map(|x| x.0).collect(),
        eigenforms: pairs.into_iter().map(|x| x.1).collect(),
        residuals,
        zero_threshold,
        kernel_dimension: kernel,
        restarts: 0,
        seed: opts.seed,
    })
}

fn solve_pencil(p: &Pencil, count: usize, opts: &SpectralOptions) -> Result<SpectralResult, SpectraError> {
    if count == 0 {
        return Err(SpectraError::EmptyRequest);
    }
    if p.m.nrows() <= opts.dense_limit {
        return dense_solve(p, count, opts);
    }
    let mut worst = f64::INFINITY;
    for attempt in 0..opts.retries.max(1) {
        let seed = opts.seed.wrapping_add(attempt as u64);
        match krylov_attempt(p, count, opts, seed) {
            Ok(r) => return Ok(r),
            Err(SpectraError::NotConverged { residual, .. }) => {
                log::warn!("eigensolver attempt {attempt} stalled at residual {residual:.3e}; reseeding");
                worst = worst.min(residual);
            }
            Err(e) => return Err(e),
        }
    }
    Err(SpectraError::NotConverged {
        tol: opts.tol,
        retries: opts.retries,
        residual: worst,
    })
}

/// Smallest nonzero eigenvalues of `d₁ᵀ M₂ d₁ u = λ M₁ u` (the coexact
/// 1-form spectrum) with `M₁`-orthonormal eigenforms.
pub fn coexact_spectrum(
    m: &MetricData,
    count: usize,
    opts: &SpectralOptions,
) -> Result<SpectralResult, SpectraError> {
    if !m.complex().is_closed_3manifold() {
        return Err(SpectraError::NotClosed);
    }
    let pencil = Pencil {
        k: m.d(1).congruence(m.mass(2)),
        m: m.mass(1),
        m_chol: m.mass_cholesky(1)?,
        exact: if m.mass(1).nrows() <= opts.dense_limit {
            None
        } else {
            Some(ExactProjector::new(m)?)
        },
    };
    solve_pencil(&pencil, count, opts)
}

/// Smallest nonzero eigenvalues of the function pencil `d₀ᵀ M₁ d₀ f = λ M₀ f`.
pub fn function_spectrum(
    m: &MetricData,
    count: usize,
    opts: &SpectralOptions,
) -> Result<SpectralResult, SpectraError> {
    let pencil = Pencil {
        k: m.d(0).congruence(m.mass(1)),
        m: m.mass(0),
        m_chol: m.mass_cholesky(0)?,
        exact: None,
    };
    solve_pencil(&pencil, count, opts)
}

/// Nonzero eigenvalues of the down-pencil on 1-cochains,
/// `M₁ d₀ M₀⁻¹ d₀ᵀ M₁ u = λ M₁ u`, computed densely (small meshes only).
pub fn exact_spectrum_dense(m: &MetricData, count: usize, zero_factor: f64) -> Result<Vec<f64>, SpectraError> {
    let m0 = dense(m.mass(0));
    let m1 = dense(m.mass(1));
    let d0 = dense(m.d(0));
    let m0inv = m0.try_inverse().ok_or(SolveError::NotPositiveDefinite)?;
    let b = &m1 * &d0;
    let k = &b * m0inv * b.transpose();
    let scale = k.trace() / m1.trace();
    let (vals, _) = dense_pencil(&k, &m1)?;
    Ok(vals
        .into_iter()
        .filter(|&v| v >= zero_factor * scale)
        .take(count)
        .collect())
}

/// Number of eigenvalues of the up-pencil below the zero threshold, from the
/// full dense spectrum (small meshes only).
pub fn up_pencil_kernel_dimension(m: &MetricData, zero_factor: f64) -> Result<usize, SpectraError> {
    let k = m.d(1).congruence(m.mass(2));
    let scale = k.diagonal().iter().sum::<f64>() / m.mass(1).diagonal().iter().sum::<f64>();
    let (vals, _) = dense_pencil(&dense(&k), &dense(m.mass(1)))?;
    Ok(vals.iter().filter(|&&v| v < zero_factor * scale).count())
}

pub use crate::dec::norms::sup_l2_ratio;
