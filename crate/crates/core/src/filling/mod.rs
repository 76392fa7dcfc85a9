//! Filling areas of homologically trivial cycles by linear programming,
//! reduction of curves to the 1-skeleton, and upper estimates of the
//! isoperimetric constant `h¹`.

pub mod cheeger;
pub mod projection;

pub use cheeger::{cheeger_estimate, CheegerCandidate, CheegerEstimate, CheegerOptions, CycleSource};
pub use projection::{project_path, project_to_skeleton, ConeTriangle, PolySegment, Projection};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{Chain, ComplexError, SimplicialComplex};
use crate::dec::MetricData;
use crate::homology::{classify_cycle, spanning_forest_edges, HomologyBasis, HomologyError, TrivialOrder};
use crate::lp::{self, LpProblem, LpStatus};
use crate::sparse::CsrMatrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FillingError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error("cycle is not homologically trivial (free coordinates {0:?})")]
    NotTrivial(Vec<i64>),
    #[error("filling LP is infeasible at r = {r}")]
    Infeasible { r: u64 },
    #[error("filling LP failed: {0:?}")]
    Lp(LpStatus),
    #[error("face areas have length {got}, expected {expected}")]
    AreaLength { expected: usize, got: usize },
    #[error("curve is not closed (endpoint gap {gap:.3e})")]
    NotClosed { gap: f64 },
    #[error("cell trace inconsistent with geometry at segment {segment}")]
    InconsistentTrace { segment: usize },
    #[error("sampler produced no homologically trivial cycles; increase the cycle budget")]
    NoTrivialCycles,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FillingOptions {
    /// Largest `rows + columns` handled by the dense simplex.
    pub dense_limit: usize,
    /// Integer cross-check on complexes with at most this many triangles.
    pub integer_check_limit: usize,
    pub integer_node_limit: usize,
    /// Use the lcm of all torsion orders instead of the per-curve order.
    pub universal_r: bool,
}

impl Default for FillingOptions {
    fn default() -> Self {
        Self {
            dense_limit: 600,
            integer_check_limit: 40,
            integer_node_limit: 20_000,
            universal_r: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FillingResult {
    /// Filling area normalised by `r`.
    pub area: f64,
    /// Real 2-chain with boundary `r·γ`, as `(triangle, coefficient)`.
    pub chain: Vec<(usize, f64)>,
    pub r_used: u64,
    pub lp_status: LpStatus,
    /// Integer optimum minus LP optimum (both normalised), when computed.
    pub integrality_gap: Option<f64>,
    /// `max |∂₂ chain − r·γ|`
    pub boundary_residual: f64,
}

impl FillingResult {
    fn empty(r: u64) -> Self {
        Self {
            area: 0.0,
            chain: Vec::new(),
            r_used: r,
            lp_status: LpStatus::Optimal,
            integrality_gap: Some(0.0),
            boundary_residual: 0.0,
        }
    }
}

/// Filling LP: `min Σ a_f (x⁺_f + x⁻_f)` subject to `∂₂(x⁺ − x⁻) = r·γ`.
/// Rows are restricted to non-tree edges; a cycle is determined there.
fn filling_problem(
    d2: &CsrMatrix<i64>,
    nontree_row: &[usize],
    rows: usize,
    areas: &[f64],
    gamma: &Chain,
    r: u64,
) -> LpProblem {
    let nf = areas.len();
    let mut trip = Vec::with_capacity(2 * d2.nnz());
    for (e, f, v) in d2.iter() {
        let row = nontree_row[e];
        if row != usize::MAX {
            trip.push((row, f, v as f64));
            trip.push((row, nf + f, -(v as f64)));
        }
    }
    let mut b = vec![0.0; rows];
    for (e, c) in gamma.iter() {
        if nontree_row[e] != usize::MAX {
            b[nontree_row[e]] = (r as i64 * c) as f64;
        }
    }
    let mut c = areas.to_vec();
    c.extend_from_slice(areas);
    LpProblem {
        a: CsrMatrix::from_triplets(rows, 2 * nf, &trip),
        b,
        c,
    }
}

/// Precomputed data shared by many fillings on one complex.
pub struct FillingContext<'a> {
    cx: &'a SimplicialComplex,
    areas: &'a [f64],
    d2: CsrMatrix<i64>,
    nontree_row: Vec<usize>,
    rows: usize,
}

impl<'a> FillingContext<'a> {
    pub fn new(cx: &'a SimplicialComplex, areas: &'a [f64]) -> Result<Self, FillingError> {
        if areas.len() != cx.count(2) {
            return Err(FillingError::AreaLength {
                expected: cx.count(2),
                got: areas.len(),
            });
        }
        let tree = spanning_forest_edges(cx);
        let mut nontree_row = vec![usize::MAX; cx.count(1)];
        let mut rows = 0;
        for (e, &is_tree) in tree.iter().enumerate() {
            if !is_tree {
                nontree_row[e] = rows;
                rows += 1;
            }
        }
        Ok(Self {
            cx,
            areas,
            d2: cx.boundary_matrix(2)?,
            nontree_row,
            rows,
        })
    }

    pub fn complex(&self) -> &SimplicialComplex {
        self.cx
    }

    /// Minimal real filling of `r·γ` for the order `r` from `h`.
    pub fn fill(
        &self,
        h: &HomologyBasis,
        gamma: &Chain,
        opts: &FillingOptions,
    ) -> Result<FillingResult, FillingError> {
        let class = classify_cycle(self.cx, h, gamma)?;
        let r = match class.trivial_order {
            TrivialOrder::Infinite => return Err(FillingError::NotTrivial(class.free_coords)),
            TrivialOrder::Finite(r) if opts.universal_r => r.max(h.r_universal),
            TrivialOrder::Finite(r) => r,
        };
        self.fill_at(gamma, r, opts)
    }

    /// Minimal real filling of `r·γ` for a given `r`.
    pub fn fill_at(&self, gamma: &Chain, r: u64, opts: &FillingOptions) -> Result<FillingResult, FillingError> {
        if gamma.is_zero() {
            return Ok(FillingResult::empty(r));
        }
        let nf = self.areas.len();
        let problem = filling_problem(&self.d2, &self.nontree_row, self.rows, self.areas, gamma, r);
        let sol = lp::solve(&problem, opts.dense_limit);
        match sol.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => return Err(FillingError::Infeasible { r }),
            LpStatus::Unbounded => return Err(FillingError::Lp(LpStatus::Unbounded)),
        }
        let chain: Vec<(usize, f64)> = (0..nf)
            .map(|f| (f, sol.x[f] - sol.x[nf + f]))
            .filter(|&(_, v)| v.abs() > 1e-12)
            .collect();
        let area = chain.iter().map(|&(f, v)| self.areas[f] * v.abs()).sum::<f64>() / r as f64;

        let mut bd = vec![0.0; self.cx.count(1)];
        let d2t = self.d2.transpose();
        for &(f, v) in &chain {
            let (edges, signs) = d2t.row(f);
            for (&e, &s) in edges.iter().zip(signs) {
                bd[e] += s as f64 * v;
            }
        }
        for (e, c) in gamma.iter() {
            bd[e] -= (r as i64 * c) as f64;
        }
        let boundary_residual = bd.iter().fold(0.0f64, |a, v| a.max(v.abs()));

        let integrality_gap = if nf <= opts.integer_check_limit {
            lp::solve_integer(&problem, opts.integer_node_limit)
                .filter(|s| s.status == LpStatus::Optimal)
                .map(|s| s.objective / r as f64 - area)
        } else {
            None
        };
        Ok(FillingResult {
            area,
            chain,
            r_used: r,
            lp_status: LpStatus::Optimal,
            integrality_gap,
            boundary_residual,
        })
    }

    /// Fills many cycles in parallel; results in input order.
    pub fn fill_many(
        &self,
        h: &HomologyBasis,
        cycles: &[Chain],
        opts: &FillingOptions,
    ) -> Vec<Result<FillingResult, FillingError>> {
        cycles.par_iter().map(|g| self.fill(h, g, opts)).collect()
    }
}

/// `A(γ)`: minimal area of a real 2-chain bounding `r·γ`, divided by `r`,
/// with `r` the order of `γ` in `H₁(M; Z)`.
pub fn min_filling_area(
    cx: &SimplicialComplex,
    face_areas: &[f64],
    h: &HomologyBasis,
    gamma: &Chain,
    opts: &FillingOptions,
) -> Result<FillingResult, FillingError> {
    FillingContext::new(cx, face_areas)?.fill(h, gamma, opts)
}

/// [`min_filling_area`] with the triangle areas of a metric.
pub fn min_filling_area_metric(
    m: &MetricData,
    h: &HomologyBasis,
    gamma: &Chain,
    opts: &FillingOptions,
) -> Result<FillingResult, FillingError> {
    min_filling_area(m.complex(), &m.measures().face_areas, h, gamma, opts)
}
