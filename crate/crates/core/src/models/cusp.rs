//! Cusp-like warped product: `[ln ε, −ln ε] × S²` with metric
//! `dt² + ε² cosh²(t) g_{S²}`, closed off by two round half 3-spheres.
//!
//! Test forms `f(t)·α` with `α` coclosed on `S²` have Rayleigh quotient
//! `‖f′‖² / ‖f‖²`, so `λ¹₁` is bounded by the first Dirichlet eigenvalue of
//! the interval, which tends to 0 as `ε → 0`.

use std::collections::HashMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::complex::{build_complex, Chain};
use crate::dec::{assemble_metric, det3, CellGeometry, Geometry, Mat3, MetricData};

use super::ModelError;

/// Smallest accepted grid size of the 1-D problem.
pub const MIN_GRID: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CuspModel {
    pub epsilon: f64,
    pub grid_size: usize,
}

impl CuspModel {
    pub fn new(epsilon: f64, grid_size: usize) -> Result<Self, ModelError> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(ModelError::Parameter {
                name: "epsilon",
                value: epsilon,
                range: "(0, 1)",
            });
        }
        if grid_size < MIN_GRID {
            return Err(ModelError::Resolution {
                model: "cusp interval",
                min: MIN_GRID,
                got: grid_size,
            });
        }
        Ok(Self { epsilon, grid_size })
    }

    /// `ln(1/ε)`, half the length of the central part.
    pub fn half_length(&self) -> f64 {
        -self.epsilon.ln()
    }

    /// Warping function `s(t) = ε cosh t`.
    pub fn profile(&self, t: f64) -> f64 {
        self.epsilon * t.cosh()
    }

    /// `∫ s(t)² vol(S²) dt` over the central part.
    pub fn central_volume(&self) -> f64 {
        let l = self.half_length();
        4.0 * PI * self.epsilon * self.epsilon * (l + (2.0 * l).sinh() / 2.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CuspEigenvalue {
    /// Smallest eigenvalue of the second-order finite-difference Dirichlet
    /// Laplacian on the interior grid.
    pub finite_difference: f64,
    /// `(π / (2 ln(1/ε)))²`
    pub analytic: f64,
    /// `‖f′‖² / ‖f‖²` of the discrete eigenfunction, with forward
    /// differences and zero boundary values.
    pub rayleigh: f64,
    pub relative_error: f64,
    pub grid_size: usize,
    pub spacing: f64,
    #[serde(skip)]
    pub eigenfunction: Vec<f64>,
}

/// Number of eigenvalues below `x` of the tridiagonal matrix with constant
/// diagonal `a` and off-diagonal `b`, by the signs of the LDLᵀ pivots.
fn sturm_count(n: usize, a: f64, b: f64, x: f64) -> usize {
    let mut count = 0;
    let mut q = a - x;
    for i in 0..n {
        if i > 0 {
            let prev = if q == 0.0 { f64::EPSILON * b.abs() } else { q };
            q = a - x - b * b / prev;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// First Dirichlet eigenvalue of `−f″` on `[ln ε, −ln ε]`.
pub fn cusp_eigenvalue(model: &CuspModel) -> Result<CuspEigenvalue, ModelError> {
    let model = CuspModel::new(model.epsilon, model.grid_size)?;
    let n = model.grid_size;
    let len = 2.0 * model.half_length();
    let h = len / (n + 1) as f64;
    // Work with h²·A, diagonal 2 and off-diagonal −1, to keep the pivots O(1).
    let (mut lo, mut hi) = (0.0, 4.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(n, 2.0, -1.0, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let lambda = 0.5 * (lo + hi) / (h * h);

    // Eigenvector by the three-term recurrence, then one Rayleigh quotient.
    let c = 2.0 - lambda * h * h;
    let mut f = vec![0.0; n];
    f[0] = 1.0;
    if n > 1 {
        f[1] = c;
    }
    for i in 2..n {
        f[i] = c * f[i - 1] - f[i - 2];
    }
    let norm = f.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in f.iter_mut() {
        *x /= norm;
    }
    let mut grad = f[0] * f[0] + f[n - 1] * f[n - 1];
    grad += f.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum::<f64>();
    let rayleigh = grad / (h * h);

    let analytic = (PI / len).powi(2);
    Ok(CuspEigenvalue {
        finite_difference: lambda,
        analytic,
        rayleigh,
        relative_error: (lambda - analytic).abs() / analytic,
        grid_size: n,
        spacing: h,
        eigenfunction: f,
    })
}

/// Octahedron with `level` rounds of 4-to-1 midpoint subdivision, projected
/// to the unit sphere.
pub fn sphere_mesh(level: usize) -> (Vec<[f64; 3]>, Vec<[usize; 3]>) {
    let mut pts = vec![
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ];
    let mut tris = vec![
        [0, 2, 4],
        [2, 1, 4],
        [1, 3, 4],
        [3, 0, 4],
        [2, 0, 5],
        [1, 2, 5],
        [3, 1, 5],
        [0, 3, 5],
    ];
    for _ in 0..level {
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, pts: &mut Vec<[f64; 3]>| -> usize {
            *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
                let p: [f64; 3] = std::array::from_fn(|k| pts[a][k] + pts[b][k]);
                let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
                pts.push(p.map(|x| x / n));
                pts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(4 * tris.len());
        for [a, b, c] in tris {
            let ab = midpoint(a, b, &mut pts);
            let bc = midpoint(b, c, &mut pts);
            let ca = midpoint(c, a, &mut pts);
            next.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
        }
        tris = next;
    }
    (pts, tris)
}

fn sub<const D: usize>(a: [f64; D], b: [f64; D]) -> [f64; D] {
    std::array::from_fn(|k| a[k] - b[k])
}

fn dot<const D: usize>(a: [f64; D], b: [f64; D]) -> f64 {
    (0..D).map(|k| a[k] * b[k]).sum()
}

fn tri_area(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    let (u, v) = (sub(b, a), sub(c, a));
    let w = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
    0.5 * dot(w, w).sqrt()
}

/// Three tetrahedra of the prism over `tri` between `lower` and `upper`
/// copies, split along diagonals chosen by sphere vertex order so that
/// neighbouring prisms agree.
fn prism(tri: [usize; 3], lower: impl Fn(usize) -> usize, upper: impl Fn(usize) -> usize) -> [[usize; 4]; 3] {
    let mut s = tri;
    s.sort_unstable();
    let [a, b, c] = s;
    [
        [lower(a), lower(b), lower(c), upper(c)],
        [lower(a), lower(b), upper(b), upper(c)],
        [lower(a), upper(a), upper(b), upper(c)],
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CuspRegion {
    Central,
    LeftCap,
    RightCap,
}

/// Meshed cusp-like 3-sphere.
pub struct CuspMesh {
    pub metric: MetricData,
    pub model: CuspModel,
    pub sphere_level: usize,
    /// `t` values of the central layers.
    pub layers: Vec<f64>,
    pub cap_layers: usize,
    pub regions: Vec<CuspRegion>,
    sphere_points: Vec<[f64; 3]>,
    sphere_vertices: usize,
}

/// Product triangulation of `[ln ε, −ln ε] × S²` with `layers` slabs
/// (even, so that `t = 0` is a layer) over a sphere refined `sphere_level`
/// times, plus two caps.
///
/// Central prisms carry `dt² + κ s̄² |dp|²`, where `s̄²` is the exact mean of
/// `s(t)²` over the slab and `κ = 4π / area(polyhedral S²)` restores the
/// area of the round sphere; central volumes then integrate `s²` exactly.
/// Each cap is a round half 3-sphere of radius `s(−ln ε)` triangulated by
/// latitude layers and an apex cone; its first layer of cells is the collar
/// joining it to the product part.
pub fn cusp_mesh(model: &CuspModel, sphere_level: usize, layers: usize) -> Result<CuspMesh, ModelError> {
    let model = CuspModel::new(model.epsilon, model.grid_size)?;
    if layers < 2 || layers % 2 != 0 {
        return Err(ModelError::Resolution {
            model: "cusp layers (even)",
            min: 2,
            got: layers,
        });
    }
    let (pts, tris) = sphere_mesh(sphere_level);
    let nv = pts.len();
    let poly_area: f64 = tris.iter().map(|t| tri_area(pts[t[0]], pts[t[1]], pts[t[2]])).sum();
    let kappa = 4.0 * PI / poly_area;
    let l = model.half_length();
    let dt = 2.0 * l / layers as f64;
    let ts: Vec<f64> = (0..=layers).map(|i| -l + i as f64 * dt).collect();
    let radius = model.profile(l);
    let cap_layers = ((radius * PI / 2.0) / dt).ceil().max(2.0) as usize;

    // Vertex numbering: central layers, then each cap's inner layers and apex.
    let central = |i: usize, v: usize| i * nv + v;
    let cap_base = (layers + 1) * nv;
    let cap_stride = (cap_layers - 1) * nv + 1;
    // Cap layer j ∈ 1..cap_layers (j = cap_layers is the apex).
    let cap = move |side: usize, j: usize, v: usize| -> usize {
        let base = cap_base + side * cap_stride;
        if j == cap_layers {
            base + (cap_layers - 1) * nv
        } else {
            base + (j - 1) * nv + v
        }
    };
    let vertex_count = cap_base + 2 * cap_stride;

    let mut tets: Vec<[usize; 4]> = Vec::new();
    let mut regions = Vec::new();
    let mut grams: Vec<Mat3> = Vec::new();

    // Central part.
    let mean_s2 = |t0: f64, t1: f64| {
        let e2 = model.epsilon * model.epsilon;
        e2 * (0.5 + ((2.0 * t1).sinh() - (2.0 * t0).sinh()) / (4.0 * (t1 - t0)))
    };
    for i in 0..layers {
        let c = kappa * mean_s2(ts[i], ts[i + 1]);
        for &tri in &tris {
            for tet in prism(tri, |v| central(i, v), |v| central(i + 1, v)) {
                let coord = |g: usize| {
                    let (layer, v) = (g / nv, g % nv);
                    (ts[layer], pts[v])
                };
                let (t0, p0) = coord(tet[0]);
                let e: [(f64, [f64; 3]); 3] = std::array::from_fn(|k| {
                    let (t, p) = coord(tet[k + 1]);
                    (t - t0, sub(p, p0))
                });
                grams.push(std::array::from_fn(|a| {
                    std::array::from_fn(|b| e[a].0 * e[b].0 + c * dot(e[a].1, e[b].1))
                }));
                tets.push(tet);
                regions.push(CuspRegion::Central);
            }
        }
    }

    // Caps: the point at latitude layer j over sphere point p sits at
    // (R sin φⱼ p, R cos φⱼ) in R⁴, with φ₀ = π/2 on the glued layer.
    for side in 0..2 {
        let glued = if side == 0 { 0 } else { layers };
        let region = if side == 0 { CuspRegion::LeftCap } else { CuspRegion::RightCap };
        let id = |j: usize, v: usize| if j == 0 { central(glued, v) } else { cap(side, j, v) };
        let position = |j: usize, v: usize| -> [f64; 4] {
            let phi = PI / 2.0 * (1.0 - j as f64 / cap_layers as f64);
            let p = pts[v];
            let r = radius * phi.sin();
            [r * p[0], r * p[1], r * p[2], radius * phi.cos()]
        };
        for j in 0..cap_layers {
            for &tri in &tris {
                let cells: Vec<([usize; 4], [[f64; 4]; 4])> = if j + 1 < cap_layers {
                    let lower = prism(tri, |v| id(j, v), |v| id(j + 1, v));
                    let lower_pos = prism(tri, |v| v, |v| v + nv);
                    lower
                        .iter()
                        .zip(lower_pos)
                        .map(|(&t, lp)| {
                            (t, lp.map(|x| if x < nv { position(j, x) } else { position(j + 1, x - nv) }))
                        })
                        .collect()
                } else {
                    let [a, b, c] = tri;
                    vec![(
                        [id(j, a), id(j, b), id(j, c), cap(side, cap_layers, 0)],
                        [position(j, a), position(j, b), position(j, c), position(cap_layers, 0)],
                    )]
                };
                for (tet, p) in cells {
                    let e: [[f64; 4]; 3] = std::array::from_fn(|k| sub(p[k + 1], p[0]));
                    grams.push(std::array::from_fn(|a| std::array::from_fn(|b| dot(e[a], e[b]))));
                    tets.push(tet);
                    regions.push(region);
                }
            }
        }
    }

    let cx = build_complex(vertex_count, &tets)?;
    // `build_complex` stores vertices sorted; reorder each Gram to match.
    let mut sorted_grams = Vec::with_capacity(grams.len());
    for (k, (g, input)) in grams.iter().zip(&tets).enumerate() {
        let sorted = cx.tets()[k];
        let perm: [usize; 4] = std::array::from_fn(|i| input.iter().position(|&v| v == sorted[i]).expect("same vertices"));
        let g2 = reorder_gram(g, perm);
        if det3(&g2) <= 0.0 {
            return Err(ModelError::Degenerate { tet: k });
        }
        sorted_grams.push(g2);
    }
    let metric = assemble_metric(
        cx,
        Geometry::Cells(CellGeometry {
            grams: sorted_grams,
            measures: None,
            charts: None,
        }),
    )?;
    Ok(CuspMesh {
        metric,
        model,
        sphere_level,
        layers: ts,
        cap_layers,
        regions,
        sphere_points: pts,
        sphere_vertices: nv,
    })
}

/// Gram matrix of the same tetrahedron with corners listed in the order
/// `perm` (new corner `i` is old corner `perm[i]`).
fn reorder_gram(g: &Mat3, perm: [usize; 4]) -> Mat3 {
    // ⟨v_a − v₀, v_b − v₀⟩ in the old corner order.
    let ip = |a: usize, b: usize| if a == 0 || b == 0 { 0.0 } else { g[a - 1][b - 1] };
    let o = perm[0];
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let (a, b) = (perm[i + 1], perm[j + 1]);
            ip(a, b) - ip(a, o) - ip(o, b) + ip(o, o)
        })
    })
}

impl CuspMesh {
    /// Summed volume of the central cells.
    pub fn central_volume(&self) -> f64 {
        self.metric
            .volumes()
            .iter()
            .zip(&self.regions)
            .filter(|(_, r)| **r == CuspRegion::Central)
            .map(|(v, _)| v)
            .sum()
    }

    /// Equator `z = 0` of the sphere at `t = 0`, a meridian 2-sphere's
    /// great circle.
    pub fn equator(&self) -> Chain {
        let mid = (self.layers.len() - 1) / 2;
        let mut ring: Vec<(f64, usize)> = self
            .sphere_points
            .iter()
            .enumerate()
            .filter(|(_, p)| p[2].abs() < 1e-12)
            .map(|(v, p)| (p[1].atan2(p[0]), mid * self.sphere_vertices + v))
            .collect();
        ring.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut walk: Vec<usize> = ring.iter().map(|r| r.1).collect();
        walk.push(walk[0]);
        Chain::edge_path(self.metric.complex(), &walk).expect("equator runs along edges")
    }
}
