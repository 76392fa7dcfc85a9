//! Metric data on a tetrahedral complex: per-cell Gram matrices, Whitney mass
//! matrices, volumes and the edge/face measures used for lengths and areas.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{SimplicialComplex, TET_EDGES, TET_FACES};
use crate::sparse::{CsrMatrix, SparseCholesky};

use super::whitney::{self, Vec3, GRAD_LAMBDA};
use super::DecError;

pub type Mat3 = [[f64; 3]; 3];

pub fn det3(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub fn inv3(m: &Mat3) -> Option<Mat3> {
    let d = det3(m);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let mut inv = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (a, b) = ((j + 1) % 3, (j + 2) % 3);
            let (c, e) = ((i + 1) % 3, (i + 2) % 3);
            inv[i][j] = (m[a][c] * m[b][e] - m[a][e] * m[b][c]) / d;
        }
    }
    Some(inv)
}

pub fn mat_vec(m: &Mat3, v: Vec3) -> Vec3 {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

/// Constant metric of one tetrahedron in its reference coordinates.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TetGeometry {
    /// `G_ij = ⟨Pᵢ − P₀, Pⱼ − P₀⟩`
    pub gram: Mat3,
    pub gram_inv: Mat3,
    pub det: f64,
    pub volume: f64,
    /// Orientation of the sorted vertex order relative to the manifold.
    pub orientation: f64,
    /// `⟨dλᵢ, dλⱼ⟩`
    pub grad_dot: [[f64; 4]; 4],
}

impl TetGeometry {
    pub fn from_gram(gram: Mat3, orientation: f64) -> Option<Self> {
        let det = det3(&gram);
        if !(det > 0.0) || gram[0][0] <= 0.0 {
            return None;
        }
        let sym = (0..3).all(|i| (0..3).all(|j| (gram[i][j] - gram[j][i]).abs() <= 1e-12 * det.sqrt()));
        if !sym {
            return None;
        }
        let gram_inv = inv3(&gram)?;
        let mut grad_dot = [[0.0; 4]; 4];
        for (i, row) in grad_dot.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = whitney::dot3(GRAD_LAMBDA[i], mat_vec(&gram_inv, GRAD_LAMBDA[j]));
            }
        }
        Some(Self {
            gram,
            gram_inv,
            det,
            volume: det.sqrt() / 6.0,
            orientation: if orientation < 0.0 { -1.0 } else { 1.0 },
            grad_dot,
        })
    }

    /// Gram matrix of the edge vectors of an embedded tetrahedron.
    pub fn from_corners(p: &[[f64; 3]; 4]) -> Option<Self> {
        let e: [Vec3; 3] = std::array::from_fn(|i| {
            std::array::from_fn(|k| p[i + 1][k] - p[0][k])
        });
        let gram: Mat3 = std::array::from_fn(|i| std::array::from_fn(|j| whitney::dot3(e[i], e[j])));
        let orient = whitney::dot3(whitney::cross(e[0], e[1]), e[2]);
        Self::from_gram(gram, orient)
    }

    /// `⟨a, b⟩` of covectors.
    pub fn inner1(&self, a: Vec3, b: Vec3) -> f64 {
        whitney::dot3(a, mat_vec(&self.gram_inv, b))
    }

    /// `⟨v, w⟩` of 2-forms in `(ω₂₃, ω₃₁, ω₁₂)` components.
    pub fn inner2(&self, v: Vec3, w: Vec3) -> f64 {
        whitney::dot3(v, mat_vec(&self.gram, w)) / self.det
    }

    /// Length of a tangent vector given in reference coordinates.
    pub fn vector_length(&self, v: Vec3) -> f64 {
        whitney::dot3(v, mat_vec(&self.gram, v)).max(0.0).sqrt()
    }

    /// Displacement between barycentric points in reference coordinates.
    pub fn displacement(p: &[f64; 4], q: &[f64; 4]) -> Vec3 {
        [q[1] - p[1], q[2] - p[2], q[3] - p[3]]
    }

    pub fn segment_length(&self, p: &[f64; 4], q: &[f64; 4]) -> f64 {
        self.vector_length(Self::displacement(p, q))
    }

    /// Local vertex `i` in reference coordinates.
    pub fn vertex(i: usize) -> Vec3 {
        let mut v = [0.0; 3];
        if i > 0 {
            v[i - 1] = 1.0;
        }
        v
    }

    pub fn edge_length(&self, a: usize, b: usize) -> f64 {
        let (pa, pb) = (Self::vertex(a), Self::vertex(b));
        self.vector_length(std::array::from_fn(|k| pb[k] - pa[k]))
    }

    pub fn face_area(&self, a: usize, b: usize, c: usize) -> f64 {
        let (pa, pb, pc) = (Self::vertex(a), Self::vertex(b), Self::vertex(c));
        let u: Vec3 = std::array::from_fn(|k| pb[k] - pa[k]);
        let v: Vec3 = std::array::from_fn(|k| pc[k] - pa[k]);
        let gu = mat_vec(&self.gram, u);
        let uu = whitney::dot3(u, gu);
        let vv = whitney::dot3(v, mat_vec(&self.gram, v));
        let uv = whitney::dot3(v, gu);
        0.5 * (uu * vv - uv * uv).max(0.0).sqrt()
    }
}

/// Edge lengths and triangle areas of a complex, indexed like its simplices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measures {
    pub edge_lengths: Vec<f64>,
    pub face_areas: Vec<f64>,
}

impl Measures {
    /// Euclidean measures of a complex with vertex positions.
    pub fn from_positions(cx: &SimplicialComplex, positions: &[[f64; 3]]) -> Self {
        let dist = |a: usize, b: usize| -> f64 {
            (0..3)
                .map(|k| (positions[a][k] - positions[b][k]).powi(2))
                .sum::<f64>()
                .sqrt()
        };
        let edge_lengths = cx.edges().iter().map(|&[a, b]| dist(a, b)).collect();
        let face_areas = cx
            .triangles()
            .iter()
            .map(|&[a, b, c]| {
                let u: Vec3 = std::array::from_fn(|k| positions[b][k] - positions[a][k]);
                let v: Vec3 = std::array::from_fn(|k| positions[c][k] - positions[a][k]);
                let w = whitney::cross(u, v);
                0.5 * whitney::dot3(w, w).sqrt()
            })
            .collect();
        Self {
            edge_lengths,
            face_areas,
        }
    }

    /// Measures read from the first tetrahedron containing each simplex.
    pub fn from_cells(cx: &SimplicialComplex, cells: &[TetGeometry]) -> Self {
        let mut edge_lengths = vec![f64::NAN; cx.count(1)];
        let mut face_areas = vec![f64::NAN; cx.count(2)];
        for (t, g) in cells.iter().enumerate() {
            for (local, &e) in cx.tet_edges(t).iter().enumerate() {
                if edge_lengths[e].is_nan() {
                    let [a, b] = TET_EDGES[local];
                    edge_lengths[e] = g.edge_length(a, b);
                }
            }
            for (local, &f) in cx.tet_faces(t).iter().enumerate() {
                if face_areas[f].is_nan() {
                    let [a, b, c] = TET_FACES[local];
                    face_areas[f] = g.face_area(a, b, c);
                }
            }
        }
        Self {
            edge_lengths,
            face_areas,
        }
    }
}

/// Metric input for [`assemble_metric`].
#[derive(Clone, Debug)]
pub enum Geometry {
    /// Vertex positions in R³; orientation is set from the sign of each
    /// tetrahedron's determinant.
    Embedding(Vec<[f64; 3]>),
    /// Per-tetrahedron constant tensors; orientation comes from the complex.
    Cells(CellGeometry),
}

#[derive(Clone, Debug)]
pub struct CellGeometry {
    /// Gram matrix of each tetrahedron in reference coordinates.
    pub grams: Vec<Mat3>,
    /// Single-valued edge lengths and face areas. Defaults to the first
    /// coface tetrahedron's values.
    pub measures: Option<Measures>,
    /// Optional per-tetrahedron corner coordinates in a local chart, used to
    /// report positions of points.
    pub charts: Option<Vec<[[f64; 3]; 4]>>,
}

/// Metric structure of a closed or bounded tetrahedral complex.
pub struct MetricData {
    complex: SimplicialComplex,
    cells: Vec<TetGeometry>,
    measures: Measures,
    mass: [CsrMatrix; 4],
    coboundary: [CsrMatrix; 3],
    total_volume: f64,
    charts: Option<Vec<[[f64; 3]; 4]>>,
    mass_factor: [OnceLock<Result<SparseCholesky, DecError>>; 4],
}

impl std::fmt::Debug for MetricData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MetricData")
            .field("tets", &self.cells.len())
            .field("total_volume", &self.total_volume)
            .finish()
    }
}

/// Builds cell metrics and assembles the Whitney mass matrices.
pub fn assemble_metric(
    mut complex: SimplicialComplex,
    geometry: Geometry,
) -> Result<MetricData, DecError> {
    if complex.dim() != 3 {
        return Err(DecError::NotThreeDimensional);
    }
    let nt = complex.count(3);
    let (cells, measures, charts) = match geometry {
        Geometry::Embedding(pos) => {
            if pos.len() != complex.vertex_count() {
                return Err(DecError::GeometryLength {
                    expected: complex.vertex_count(),
                    got: pos.len(),
                });
            }
            let corners: Vec<[[f64; 3]; 4]> = complex
                .tets()
                .iter()
                .map(|t| t.map(|v| pos[v]))
                .collect();
            let mut cells = Vec::with_capacity(nt);
            for (t, c) in corners.iter().enumerate() {
                cells.push(
                    TetGeometry::from_corners(c).ok_or(DecError::DegenerateCell { tet: t })?,
                );
            }
            let signs: Vec<i8> = cells.iter().map(|g| g.orientation as i8).collect();
            complex.set_orientation(signs)?;
            let measures = Measures::from_positions(&complex, &pos);
            (cells, measures, Some(corners))
        }
        Geometry::Cells(cg) => {
            if cg.grams.len() != nt {
                return Err(DecError::GeometryLength {
                    expected: nt,
                    got: cg.grams.len(),
                });
            }
            let orient = complex.orientation();
            let mut cells = Vec::with_capacity(nt);
            for (t, g) in cg.grams.iter().enumerate() {
                cells.push(
                    TetGeometry::from_gram(*g, orient[t] as f64)
                        .ok_or(DecError::DegenerateCell { tet: t })?,
                );
            }
            let measures = match cg.measures {
                Some(m) => {
                    if m.edge_lengths.len() != complex.count(1)
                        || m.face_areas.len() != complex.count(2)
                    {
                        return Err(DecError::GeometryLength {
                            expected: complex.count(1) + complex.count(2),
                            got: m.edge_lengths.len() + m.face_areas.len(),
                        });
                    }
                    m
                }
                None => Measures::from_cells(&complex, &cells),
            };
            (cells, measures, cg.charts)
        }
    };

    let local: Vec<_> = cells
        .par_iter()
        .map(|g| {
            (
                whitney::local_mass0(g),
                whitney::local_mass1(g),
                whitney::local_mass2(g),
                whitney::local_mass3(g),
            )
        })
        .collect();
    let mut t0 = Vec::with_capacity(16 * nt);
    let mut t1 = Vec::with_capacity(36 * nt);
    let mut t2 = Vec::with_capacity(16 * nt);
    let mut t3 = Vec::with_capacity(nt);
    for (t, (m0, m1, m2, m3)) in local.iter().enumerate() {
        let verts = complex.tets()[t];
        let edges = complex.tet_edges(t);
        let faces = complex.tet_faces(t);
        for i in 0..4 {
            for j in 0..4 {
                t0.push((verts[i], verts[j], m0[i][j]));
                t2.push((faces[i], faces[j], m2[i][j]));
            }
        }
        for i in 0..6 {
            for j in 0..6 {
                t1.push((edges[i], edges[j], m1[i][j]));
            }
        }
        t3.push((t, t, *m3));
    }
    let n = [0, 1, 2, 3].map(|k| complex.count(k));
    let mass = [
        CsrMatrix::from_triplets(n[0], n[0], &t0),
        CsrMatrix::from_triplets(n[1], n[1], &t1),
        CsrMatrix::from_triplets(n[2], n[2], &t2),
        CsrMatrix::from_triplets(n[3], n[3], &t3),
    ];
    let coboundary = [
        complex.coboundary(0)?,
        complex.coboundary(1)?,
        complex.coboundary(2)?,
    ];
    let total_volume = cells.iter().map(|g| g.volume).sum();
    Ok(MetricData {
        complex,
        cells,
        measures,
        mass,
        coboundary,
        total_volume,
        charts,
        mass_factor: Default::default(),
    })
}

impl MetricData {
    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn cell(&self, t: usize) -> &TetGeometry {
        &self.cells[t]
    }

    pub fn cells(&self) -> &[TetGeometry] {
        &self.cells
    }

    pub fn volumes(&self) -> Vec<f64> {
        self.cells.iter().map(|g| g.volume).collect()
    }

    pub fn total_volume(&self) -> f64 {
        self.total_volume
    }

    pub fn measures(&self) -> &Measures {
        &self.measures
    }

    /// Whitney mass matrix `M_k`.
    pub fn mass(&self, k: usize) -> &CsrMatrix {
        &self.mass[k]
    }

    /// Coboundary `d_k = ∂_{k+1}ᵀ`.
    pub fn d(&self, k: usize) -> &CsrMatrix {
        &self.coboundary[k]
    }

    /// Cached Cholesky factor of `M_k`.
    pub fn mass_cholesky(&self, k: usize) -> Result<&SparseCholesky, DecError> {
        self.mass_factor[k]
            .get_or_init(|| SparseCholesky::new(&self.mass[k]).map_err(DecError::from))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Solves `M_k x = b`.
    pub fn mass_solve(&self, k: usize, b: &[f64]) -> Result<Vec<f64>, DecError> {
        if k == 3 {
            return Ok(b.iter().zip(&self.cells).map(|(v, g)| v * g.volume).collect());
        }
        Ok(self.mass_cholesky(k)?.solve(b))
    }

    pub fn charts(&self) -> Option<&[[[f64; 3]; 4]]> {
        self.charts.as_deref()
    }

    /// Position of a barycentric point in the tetrahedron's chart.
    pub fn position(&self, t: usize, bary: &[f64; 4]) -> Option<[f64; 3]> {
        let c = &self.charts.as_ref()?[t];
        Some(std::array::from_fn(|k| (0..4).map(|i| bary[i] * c[i][k]).sum()))
    }

    /// Local edge coefficients of a 1-cochain on tetrahedron `t`.
    pub fn local1(&self, t: usize, omega: &[f64]) -> [f64; 6] {
        self.complex.tet_edges(t).map(|e| omega[e])
    }

    /// Local face coefficients of a 2-cochain on tetrahedron `t`.
    pub fn local2(&self, t: usize, omega: &[f64]) -> [f64; 4] {
        self.complex.tet_faces(t).map(|f| omega[f])
    }

    /// Local vertex coefficients of a 0-cochain on tetrahedron `t`.
    pub fn local0(&self, t: usize, omega: &[f64]) -> [f64; 4] {
        self.complex.tets()[t].map(|v| omega[v])
    }

    /// `∫_M W(a) ∧ W(b)` for a 2-cochain `a` and 1-cochain `b`, as the
    /// sparse matrix `C` with `aᵀ C b`.
    pub fn wedge21_matrix(&self) -> CsrMatrix {
        let mut trip = Vec::with_capacity(24 * self.cells.len());
        for (t, g) in self.cells.iter().enumerate() {
            let c = whitney::local_wedge21(g.orientation);
            let faces = self.complex.tet_faces(t);
            let edges = self.complex.tet_edges(t);
            for i in 0..4 {
                for j in 0..6 {
                    trip.push((faces[i], edges[j], c[i][j]));
                }
            }
        }
        CsrMatrix::from_triplets(self.complex.count(2), self.complex.count(1), &trip)
    }

    /// Length of a 1-chain under the edge measures.
    pub fn chain_length(&self, chain: &crate::complex::Chain) -> f64 {
        chain.weighted_l1(&self.measures.edge_lengths)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_complex;

    #[test]
    fn inverse_is_inverse() {
        let m = [[2.0, 0.3, 0.1], [0.3, 1.0, -0.2], [0.1, -0.2, 1.5]];
        let inv = inv3(&m).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let v: f64 = (0..3).map(|k| m[i][k] * inv[k][j]).sum();
                assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn right_tetrahedron_volume() {
        let cx = build_complex(4, &[[0, 1, 2, 3]]).unwrap();
        let pos = vec![[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let m = assemble_metric(cx, Geometry::Embedding(pos)).unwrap();
        let sum: f64 = m.mass(0).iter().map(|(_, _, v)| v).sum();
        assert!((sum - 1.0 / 6.0).abs() < 1e-15);
        assert!((m.total_volume() - 1.0 / 6.0).abs() < 1e-15);
        for k in 0..4 {
            assert!(m.mass_cholesky(k).is_ok() || k == 3);
        }
        let e = m.complex().edge_index(1, 2).unwrap().0;
        assert!((m.measures().edge_lengths[e] - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn flat_tetrahedron_rejected() {
        let cx = build_complex(4, &[[0, 1, 2, 3]]).unwrap();
        let pos = vec![[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]];
        assert!(matches!(
            assemble_metric(cx, Geometry::Embedding(pos)),
            Err(DecError::DegenerateCell { tet: 0 })
        ));
    }

    #[test]
    fn gram_measures_agree_with_embedding() {
        let p = [[0.1, 0.0, 0.2], [1.0, 0.1, 0.0], [0.2, 1.3, 0.1], [0.0, 0.3, 0.9]];
        let g = TetGeometry::from_corners(&p).unwrap();
        let d = |a: usize, b: usize| -> f64 {
            (0..3).map(|k| (p[a][k] - p[b][k]).powi(2)).sum::<f64>().sqrt()
        };
        for [a, b] in TET_EDGES {
            assert!((g.edge_length(a, b) - d(a, b)).abs() < 1e-14);
        }
    }
}
