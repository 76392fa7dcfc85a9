//! Berger spheres `(S³, g_ε)`, the round metric shrunk by `ε²` along the
//! fibres of the Hopf action `e^{iθ}(z₁, z₂) = (e^{iθ}z₁, e^{iθ}z₂)`.
//!
//! Left-invariant coframe: `σ₁` vertical, `σ₂, σ₃` horizontal, with
//! `dσ₁ = 2σ₂∧σ₃` and cyclic permutations. The metric is
//! `ε²σ₁² + σ₂² + σ₃²`.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::complex::{build_complex, Chain};
use crate::dec::{assemble_metric, CellGeometry, Geometry, Mat3, Measures, MetricData};

use super::ModelError;

/// Maurer–Cartan constants: `dσᵢ = STRUCTURE · σⱼ∧σₖ` for cyclic `(i, j, k)`.
/// The value 2 is the one for which `ε = 1` gives eigenvalue 4 and
/// `dσ₁ = 2π*Ω` with `∫ Ω = π`.
pub const STRUCTURE: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BergerModel {
    pub epsilon: f64,
}

impl BergerModel {
    pub fn new(epsilon: f64) -> Result<Self, ModelError> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(ModelError::Parameter {
                name: "epsilon",
                value: epsilon,
                range: "(0, 1]",
            });
        }
        Ok(Self { epsilon })
    }

    /// Metric weights on the coframe `(σ₁, σ₂, σ₃)`.
    pub fn invariant_metric(&self) -> [f64; 3] {
        [self.epsilon * self.epsilon, 1.0, 1.0]
    }

    /// `d` from invariant 1-forms to invariant 2-forms in the bases
    /// `(σ₁, σ₂, σ₃)` and `(σ₂₃, σ₃₁, σ₁₂)`.
    pub fn d1(&self) -> Matrix3<f64> {
        Matrix3::from_diagonal_element(STRUCTURE)
    }

    /// `⋆` on invariant 1-forms and 2-forms in the same bases.
    pub fn stars(&self) -> (Matrix3<f64>, Matrix3<f64>) {
        let e = self.epsilon;
        (
            Matrix3::from_diagonal(&[1.0 / e, e, e].into()),
            Matrix3::from_diagonal(&[e, 1.0 / e, 1.0 / e].into()),
        )
    }

    /// Coefficient `c` in `dσ₁ = c · π*Ω`; the horizontal area form is
    /// `σ₂₃ = π*Ω`.
    pub fn d_alpha_area_coefficient(&self) -> f64 {
        self.d1()[(0, 0)]
    }

    /// `vol(CP¹)` for the base of curvature 4.
    pub fn base_area(&self) -> f64 {
        PI
    }
}

/// Spectrum of `δd` on left-invariant 1-forms (all of them are coclosed),
/// in increasing order.
pub fn berger_spectrum_invariant(model: &BergerModel) -> Result<[f64; 3], ModelError> {
    BergerModel::new(model.epsilon)?;
    let (_, s2) = model.stars();
    let d = model.d1();
    // δd = ⋆d⋆d on 1-forms in dimension 3.
    let lap = s2 * d * s2 * d;
    // Symmetrise with the square root of the metric weights.
    let w = model.invariant_metric().map(f64::sqrt);
    let s = Matrix3::from_diagonal(&w.into());
    let si = s.try_inverse().expect("positive weights");
    let sym = s * lap * si;
    let sym = 0.5 * (sym + sym.transpose());
    let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok([ev[0], ev[1], ev[2]])
}

/// `(2ε, π)`: the fibre ratio upper bound and the filling lower bound.
pub fn berger_h1_bounds(model: &BergerModel) -> Result<(f64, f64), ModelError> {
    BergerModel::new(model.epsilon)?;
    Ok((2.0 * model.epsilon, PI))
}

/// `J` of the Hopf action on `R⁴ = C²`.
pub fn hopf_j(p: [f64; 4]) -> [f64; 4] {
    [-p[1], p[0], -p[3], p[2]]
}

fn normalize4(p: [f64; 4]) -> [f64; 4] {
    let n = p.iter().map(|x| x * x).sum::<f64>().sqrt();
    p.map(|x| x / n)
}

fn dot4(a: [f64; 4], b: [f64; 4]) -> f64 {
    (0..4).map(|k| a[k] * b[k]).sum()
}

fn sub4(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
    std::array::from_fn(|k| a[k] - b[k])
}

fn det4(p: [[f64; 4]; 4]) -> f64 {
    nalgebra::Matrix4::from_fn(|i, j| p[i][j]).determinant()
}

/// `g_ε(u, v)` with the vertical direction taken at `at`.
fn berger_inner(eps: f64, at: [f64; 4], u: [f64; 4], v: [f64; 4]) -> f64 {
    let j = hopf_j(normalize4(at));
    dot4(u, v) - (1.0 - eps * eps) * dot4(u, j) * dot4(v, j)
}

/// Meshed Berger sphere with its vertex positions on the unit `S³`.
pub struct BergerMesh {
    pub metric: MetricData,
    pub positions: Vec<[f64; 4]>,
    pub resolution: usize,
    pub epsilon: f64,
    grid: HashMap<[i64; 4], usize>,
}

/// Boundary of the cube `[−1, 1]⁴`, each facet cut into `n³` cubes and each
/// cube into six tetrahedra along its diagonal, projected radially to `S³`.
/// Every tetrahedron carries the Gram matrix of `g_ε` on its chord vectors,
/// with the vertical direction at its centroid; edges and triangles use
/// their own midpoints. `n` must be even (and ≥ 2) so the fibre through
/// `(1, 0, 0, 0)` runs along mesh edges.
pub fn berger_mesh(model: &BergerModel, n: usize) -> Result<BergerMesh, ModelError> {
    BergerModel::new(model.epsilon)?;
    if n < 2 || n % 2 != 0 {
        return Err(ModelError::Resolution {
            model: "berger (even)",
            min: 2,
            got: n,
        });
    }
    let eps = model.epsilon;
    let ni = n as i64;
    let mut grid: HashMap<[i64; 4], usize> = HashMap::new();
    let mut positions = Vec::new();
    let mut index = |g: [i64; 4], positions: &mut Vec<[f64; 4]>| -> usize {
        *grid.entry(g).or_insert_with(|| {
            positions.push(normalize4(g.map(|c| 2.0 * c as f64 / ni as f64 - 1.0)));
            positions.len() - 1
        })
    };
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut tets = Vec::with_capacity(48 * n * n * n);
    for fixed in 0..4 {
        let free: Vec<usize> = (0..4).filter(|&k| k != fixed).collect();
        for side in [0, ni] {
            for a in 0..ni {
                for b in 0..ni {
                    for c in 0..ni {
                        for perm in PERMS {
                            let mut g = [0i64; 4];
                            g[fixed] = side;
                            g[free[0]] = a;
                            g[free[1]] = b;
                            g[free[2]] = c;
                            let mut ids = [0usize; 4];
                            ids[0] = index(g, &mut positions);
                            for step in 0..3 {
                                g[free[perm[step]]] += 1;
                                ids[step + 1] = index(g, &mut positions);
                            }
                            tets.push(ids);
                        }
                    }
                }
            }
        }
    }
    let grid_map = grid;
    let mut cx = build_complex(positions.len(), &tets)?;
    // Orientation induced from R⁴ with the outward normal first.
    let signs = cx
        .tets()
        .iter()
        .map(|t| if det4(t.map(|v| positions[v])) > 0.0 { 1 } else { -1 })
        .collect();
    cx.set_orientation(signs)?;

    let mut grams: Vec<Mat3> = Vec::with_capacity(cx.count(3));
    for (t, tet) in cx.tets().iter().enumerate() {
        let p = tet.map(|v| positions[v]);
        let centroid: [f64; 4] = std::array::from_fn(|k| p.iter().map(|q| q[k]).sum::<f64>() / 4.0);
        let e: [[f64; 4]; 3] = std::array::from_fn(|i| sub4(p[i + 1], p[0]));
        let g: Mat3 = std::array::from_fn(|i| std::array::from_fn(|j| berger_inner(eps, centroid, e[i], e[j])));
        if crate::dec::det3(&g) <= 0.0 {
            return Err(ModelError::Degenerate { tet: t });
        }
        grams.push(g);
    }
    let edge_lengths = cx
        .edges()
        .iter()
        .map(|&[a, b]| {
            let (pa, pb) = (positions[a], positions[b]);
            let mid: [f64; 4] = std::array::from_fn(|k| pa[k] + pb[k]);
            let d = sub4(pb, pa);
            berger_inner(eps, mid, d, d).max(0.0).sqrt()
        })
        .collect();
    let face_areas = cx
        .triangles()
        .iter()
        .map(|&[a, b, c]| {
            let (pa, pb, pc) = (positions[a], positions[b], positions[c]);
            let mid: [f64; 4] = std::array::from_fn(|k| pa[k] + pb[k] + pc[k]);
            let (u, v) = (sub4(pb, pa), sub4(pc, pa));
            let uu = berger_inner(eps, mid, u, u);
            let vv = berger_inner(eps, mid, v, v);
            let uv = berger_inner(eps, mid, u, v);
            0.5 * (uu * vv - uv * uv).max(0.0).sqrt()
        })
        .collect();
    let geometry = Geometry::Cells(CellGeometry {
        grams,
        measures: Some(Measures {
            edge_lengths,
            face_areas,
        }),
        charts: None,
    });
    Ok(BergerMesh {
        metric: assemble_metric(cx, geometry)?,
        positions,
        resolution: n,
        epsilon: eps,
        grid: grid_map,
    })
}

impl BergerMesh {
    /// The Hopf fibre through `(1, 0, 0, 0)`: the boundary of the square
    /// `x₃ = x₄ = 0` on the cube, oriented along the action.
    pub fn fiber_loop(&self) -> Chain {
        let n = self.resolution as i64;
        let h = n / 2;
        let mut walk = Vec::new();
        // Counter-clockwise in the (x₁, x₂) plane starting at (1, 0).
        let mut g = [n, h, h, h];
        let steps: [([i64; 4], i64); 5] = [
            ([0, 1, 0, 0], h),
            ([-1, 0, 0, 0], n),
            ([0, -1, 0, 0], n),
            ([1, 0, 0, 0], n),
            ([0, 1, 0, 0], h),
        ];
        walk.push(self.grid[&g]);
        for (dir, count) in steps {
            for _ in 0..count {
                for k in 0..4 {
                    g[k] += dir[k];
                }
                walk.push(self.grid[&g]);
            }
        }
        Chain::edge_path(self.metric.complex(), &walk).expect("fibre runs along edges")
    }

    /// `α = σ₁` (the `g₁`-dual of the action field) as edge integrals, by
    /// the midpoint rule `α(p → q) ≈ ⟨J m, q − p⟩`.
    pub fn vertical_form(&self) -> Vec<f64> {
        self.metric
            .complex()
            .edges()
            .iter()
            .map(|&[a, b]| {
                let (pa, pb) = (self.positions[a], self.positions[b]);
                let mid = normalize4(std::array::from_fn(|k| pa[k] + pb[k]));
                dot4(hopf_j(mid), sub4(pb, pa))
            })
            .collect()
    }
}
