//! Oriented simplicial complexes of dimension at most three and their integer
//! boundary operators.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sparse::CsrMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("simplex {index} references vertex {vertex}, but only {count} vertices exist")]
    VertexOutOfRange {
        index: usize,
        vertex: usize,
        count: usize,
    },
    #[error("simplex {index} repeats vertex {vertex}")]
    RepeatedVertex { index: usize, vertex: usize },
    #[error("duplicate simplex {vertices:?} (entries {first} and {second})")]
    Duplicate {
        vertices: Vec<usize>,
        first: usize,
        second: usize,
    },
    #[error("not a manifold: triangle {triangle:?} has {cofaces} tetrahedron cofaces")]
    NotManifold { triangle: [usize; 3], cofaces: usize },
    #[error("closed 3-complex is not orientable (conflict at triangle {triangle:?})")]
    NonOrientable { triangle: [usize; 3] },
    #[error("orientation vector has length {got}, expected {expected}")]
    OrientationLength { expected: usize, got: usize },
    #[error("orientation is not coherent across triangle {triangle:?}")]
    IncoherentOrientation { triangle: [usize; 3] },
    #[error("boundary degree {0} out of range")]
    BadDegree(usize),
    #[error("chain of degree {degree} references simplex {index}, but only {count} exist")]
    ChainIndex {
        degree: usize,
        index: usize,
        count: usize,
    },
    #[error("operation needs a closed orientable 3-manifold")]
    NotClosedManifold,
}

/// Local edge order inside a sorted tetrahedron `[v0, v1, v2, v3]`.
pub const TET_EDGES: [[usize; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];

/// Local face `i` of a sorted tetrahedron omits local vertex `i`.
pub const TET_FACES: [[usize; 3]; 4] = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]];

/// Local edge order inside a sorted triangle.
pub const TRI_EDGES: [[usize; 2]; 3] = [[0, 1], [0, 2], [1, 2]];

/// An oriented simplicial complex. Simplices are stored with strictly
/// increasing vertex indices; the orientation of each top-dimensional simplex
/// is a separate sign relative to that sorted order.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    n_vertices: usize,
    dim: usize,
    edges: Vec<[usize; 2]>,
    triangles: Vec<[usize; 3]>,
    tets: Vec<[usize; 4]>,
    orientation: Vec<i8>,
    edge_lookup: HashMap<[usize; 2], usize>,
    tri_lookup: HashMap<[usize; 3], usize>,
    tet_edges: Vec<[usize; 6]>,
    tet_faces: Vec<[usize; 4]>,
    tri_edges: Vec<[usize; 3]>,
    tri_cofaces: Vec<Vec<(usize, usize)>>,
    edge_cofaces: Vec<Vec<usize>>,
    vertex_edges: Vec<Vec<usize>>,
    closed: bool,
}

/// Serializable form: just the generating simplices and orientation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexData {
    pub vertex_count: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tets: Vec<[usize; 4]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub triangles: Vec<[usize; 3]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub orientation: Vec<i8>,
}

fn permutation_sign(v: &[usize]) -> i8 {
    let mut s = 1i8;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] > v[j] {
                s = -s;
            }
        }
    }
    s
}

fn sorted<const N: usize>(mut v: [usize; N]) -> [usize; N] {
    v.sort_unstable();
    v
}

fn check_simplex(index: usize, v: &[usize], count: usize) -> Result<(), ComplexError> {
    for (a, &x) in v.iter().enumerate() {
        if x >= count {
            return Err(ComplexError::VertexOutOfRange {
                index,
                vertex: x,
                count,
            });
        }
        if v[..a].contains(&x) {
            return Err(ComplexError::RepeatedVertex { index, vertex: x });
        }
    }
    Ok(())
}

/// Builds a 3-dimensional complex from tetrahedra. Each tuple's vertex order
/// gives its orientation; on a closed complex the orientation is made
/// coherent per connected component, seeded by the first tetrahedron of the
/// component.
pub fn build_complex(
    vertex_count: usize,
    tetrahedra: &[[usize; 4]],
) -> Result<SimplicialComplex, ComplexError> {
    let mut seen: HashMap<[usize; 4], usize> = HashMap::new();
    let mut tets = Vec::with_capacity(tetrahedra.len());
    let mut input_sign = Vec::with_capacity(tetrahedra.len());
    for (i, t) in tetrahedra.iter().enumerate() {
        check_simplex(i, t, vertex_count)?;
        let s = sorted(*t);
        if let Some(&first) = seen.get(&s) {
            return Err(ComplexError::Duplicate {
                vertices: s.to_vec(),
                first,
                second: i,
            });
        }
        seen.insert(s, i);
        tets.push(s);
        input_sign.push(permutation_sign(t));
    }

    let mut cx = SimplicialComplex::skeleton(vertex_count, 3, tets, Vec::new());
    for (tri, cof) in cx.tri_cofaces.iter().enumerate() {
        if cof.len() > 2 {
            return Err(ComplexError::NotManifold {
                triangle: cx.triangles[tri],
                cofaces: cof.len(),
            });
        }
    }
    cx.closed = !cx.tets.is_empty() && cx.tri_cofaces.iter().all(|c| c.len() == 2);
    cx.orientation = if cx.closed {
        cx.coherent_orientation(&input_sign)?
    } else {
        input_sign
    };
    Ok(cx)
}

/// Builds a 2-dimensional complex from triangles (orientation from the tuple
/// order). Surfaces are accepted whether or not they are manifolds or
/// orientable; they serve as homology and filling fixtures.
pub fn build_surface(
    vertex_count: usize,
    triangles: &[[usize; 3]],
) -> Result<SimplicialComplex, ComplexError> {
    let mut seen: HashMap<[usize; 3], usize> = HashMap::new();
    let mut tris = Vec::with_capacity(triangles.len());
    let mut signs = Vec::with_capacity(triangles.len());
    for (i, t) in triangles.iter().enumerate() {
        check_simplex(i, t, vertex_count)?;
        let s = sorted(*t);
        if let Some(&first) = seen.get(&s) {
            return Err(ComplexError::Duplicate {
                vertices: s.to_vec(),
                first,
                second: i,
            });
        }
        seen.insert(s, i);
        tris.push(s);
        signs.push(permutation_sign(t));
    }
    let mut cx = SimplicialComplex::skeleton(vertex_count, 2, Vec::new(), tris);
    cx.orientation = signs;
    cx.closed = cx.edge_cofaces.iter().all(|c| c.len() == 2);
    Ok(cx)
}

impl SimplicialComplex {
    /// Enumerates all faces of the given top simplices.
    fn skeleton(
        n_vertices: usize,
        dim: usize,
        tets: Vec<[usize; 4]>,
        top_tris: Vec<[usize; 3]>,
    ) -> Self {
        let mut tri_set: BTreeMap<[usize; 3], ()> = BTreeMap::new();
        for t in &tets {
            for f in TET_FACES {
                tri_set.insert([t[f[0]], t[f[1]], t[f[2]]], ());
            }
        }
        for t in &top_tris {
            tri_set.insert(*t, ());
        }
        // Top triangles of a surface keep their input order.
        let triangles: Vec<[usize; 3]> = if dim == 2 {
            top_tris
        } else {
            tri_set.into_keys().collect()
        };
        let mut edge_set: BTreeMap<[usize; 2], ()> = BTreeMap::new();
        for t in &triangles {
            for e in TRI_EDGES {
                edge_set.insert([t[e[0]], t[e[1]]], ());
            }
        }
        let edges: Vec<[usize; 2]> = edge_set.into_keys().collect();
        let edge_lookup: HashMap<[usize; 2], usize> =
            edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let tri_lookup: HashMap<[usize; 3], usize> =
            triangles.iter().enumerate().map(|(i, &t)| (t, i)).collect();

        let tri_edges: Vec<[usize; 3]> = triangles
            .iter()
            .map(|t| TRI_EDGES.map(|e| edge_lookup[&[t[e[0]], t[e[1]]]]))
            .collect();
        let tet_edges: Vec<[usize; 6]> = tets
            .iter()
            .map(|t| TET_EDGES.map(|e| edge_lookup[&[t[e[0]], t[e[1]]]]))
            .collect();
        let tet_faces: Vec<[usize; 4]> = tets
            .iter()
            .map(|t| TET_FACES.map(|f| tri_lookup[&[t[f[0]], t[f[1]], t[f[2]]]]))
            .collect();

        let mut tri_cofaces = vec![Vec::new(); triangles.len()];
        for (ti, faces) in tet_faces.iter().enumerate() {
            for (local, &f) in faces.iter().enumerate() {
                tri_cofaces[f].push((ti, local));
            }
        }
        let mut edge_cofaces = vec![Vec::new(); edges.len()];
        for (fi, es) in tri_edges.iter().enumerate() {
            for &e in es {
                edge_cofaces[e].push(fi);
            }
        }
        let mut vertex_edges = vec![Vec::new(); n_vertices];
        for (ei, e) in edges.iter().enumerate() {
            vertex_edges[e[0]].push(ei);
            vertex_edges[e[1]].push(ei);
        }
        let n_top = if dim == 3 { tets.len() } else { triangles.len() };
        Self {
            n_vertices,
            dim,
            edges,
            triangles,
            tets,
            orientation: vec![1; n_top],
            edge_lookup,
            tri_lookup,
            tet_edges,
            tet_faces,
            tri_edges,
            tri_cofaces,
            edge_cofaces,
            vertex_edges,
            closed: false,
        }
    }

    /// Induced orientation sign of local face `i` of tetrahedron `t`.
    fn induced(&self, t: usize, local: usize, orient: &[i8]) -> i8 {
        let s = if local % 2 == 0 { 1 } else { -1 };
        s * orient[t]
    }

    fn coherent_orientation(&self, seed: &[i8]) -> Result<Vec<i8>, ComplexError> {
        let mut orient = vec![0i8; self.tets.len()];
        for start in 0..self.tets.len() {
            if orient[start] != 0 {
                continue;
            }
            orient[start] = seed[start];
            let mut queue = VecDeque::from([start]);
            while let Some(t) = queue.pop_front() {
                for local in 0..4 {
                    let f = self.tet_faces[t][local];
                    for &(u, ul) in &self.tri_cofaces[f] {
                        if u == t {
                            continue;
                        }
                        let mine = self.induced(t, local, &orient);
                        let parity = if ul % 2 == 0 { 1 } else { -1 };
                        let want = -mine * parity;
                        if orient[u] == 0 {
                            orient[u] = want;
                            queue.push_back(u);
                        } else if orient[u] != want {
                            return Err(ComplexError::NonOrientable {
                                triangle: self.triangles[f],
                            });
                        }
                    }
                }
            }
        }
        Ok(orient)
    }

    /// Replaces the orientation signs; on a closed complex they must be
    /// coherent.
    pub fn set_orientation(&mut self, signs: Vec<i8>) -> Result<(), ComplexError> {
        let n = self.top_count();
        if signs.len() != n {
            return Err(ComplexError::OrientationLength {
                expected: n,
                got: signs.len(),
            });
        }
        let signs: Vec<i8> = signs.into_iter().map(|s| if s < 0 { -1 } else { 1 }).collect();
        if self.dim == 3 && self.closed {
            for (f, cof) in self.tri_cofaces.iter().enumerate() {
                let (a, al) = cof[0];
                let (b, bl) = cof[1];
                if self.induced(a, al, &signs) != -self.induced(b, bl, &signs) {
                    return Err(ComplexError::IncoherentOrientation {
                        triangle: self.triangles[f],
                    });
                }
            }
        }
        self.orientation = signs;
        Ok(())
    }

    /// Reverses every orientation sign.
    pub fn flip_orientation(&mut self) {
        for s in &mut self.orientation {
            *s = -*s;
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertex_count(&self) -> usize {
        self.n_vertices
    }

    /// Number of `k`-simplices.
    pub fn count(&self, k: usize) -> usize {
        match k {
            0 => self.n_vertices,
            1 => self.edges.len(),
            2 => self.triangles.len(),
            3 => self.tets.len(),
            _ => 0,
        }
    }

    fn top_count(&self) -> usize {
        self.count(self.dim)
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn tets(&self) -> &[[usize; 4]] {
        &self.tets
    }

    /// Orientation signs of the top-dimensional simplices.
    pub fn orientation(&self) -> &[i8] {
        &self.orientation
    }

    /// Every triangle has exactly two tetrahedron cofaces (3-complexes), or
    /// every edge two triangle cofaces (surfaces).
    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Closed orientable 3-manifold in the sense used by the spectral and flow
    /// code.
    pub fn is_closed_3manifold(&self) -> bool {
        self.dim == 3 && self.closed
    }

    pub fn require_closed_3manifold(&self) -> Result<(), ComplexError> {
        if self.is_closed_3manifold() {
            Ok(())
        } else {
            Err(ComplexError::NotClosedManifold)
        }
    }

    /// Index and sign of the oriented edge `a → b`.
    pub fn edge_index(&self, a: usize, b: usize) -> Option<(usize, i64)> {
        if a < b {
            self.edge_lookup.get(&[a, b]).map(|&i| (i, 1))
        } else {
            self.edge_lookup.get(&[b, a]).map(|&i| (i, -1))
        }
    }

    pub fn triangle_index(&self, v: [usize; 3]) -> Option<(usize, i64)> {
        let s = sorted(v);
        self.tri_lookup
            .get(&s)
            .map(|&i| (i, permutation_sign(&v) as i64))
    }

    /// Edges of tetrahedron `t`, in [`TET_EDGES`] order.
    pub fn tet_edges(&self, t: usize) -> [usize; 6] {
        self.tet_edges[t]
    }

    /// Faces of tetrahedron `t`, in [`TET_FACES`] order.
    pub fn tet_faces(&self, t: usize) -> [usize; 4] {
        self.tet_faces[t]
    }

    /// Edges of triangle `f`, in [`TRI_EDGES`] order.
    pub fn triangle_edges(&self, f: usize) -> [usize; 3] {
        self.tri_edges[f]
    }

    /// `(tet, local face)` pairs containing triangle `f`.
    pub fn triangle_cofaces(&self, f: usize) -> &[(usize, usize)] {
        &self.tri_cofaces[f]
    }

    /// Triangles containing edge `e`.
    pub fn edge_cofaces(&self, e: usize) -> &[usize] {
        &self.edge_cofaces[e]
    }

    /// Edges incident to vertex `v`.
    pub fn vertex_edges(&self, v: usize) -> &[usize] {
        &self.vertex_edges[v]
    }

    /// The tetrahedron across local face `local` of `t`, with its own local
    /// index for the shared face.
    pub fn neighbor(&self, t: usize, local: usize) -> Option<(usize, usize)> {
        let f = self.tet_faces[t][local];
        self.tri_cofaces[f].iter().copied().find(|&(u, _)| u != t)
    }

    /// Integer boundary operator ∂_k, rows indexed by (k−1)-simplices.
    pub fn boundary_matrix(&self, k: usize) -> Result<CsrMatrix<i64>, ComplexError> {
        let mut trip = Vec::new();
        match k {
            1 => {
                for (i, e) in self.edges.iter().enumerate() {
                    trip.push((e[0], i, -1));
                    trip.push((e[1], i, 1));
                }
            }
            2 => {
                // Local edge j of TRI_EDGES omits local vertex 2 − j.
                for (i, es) in self.tri_edges.iter().enumerate() {
                    trip.push((es[2], i, 1));
                    trip.push((es[1], i, -1));
                    trip.push((es[0], i, 1));
                }
            }
            3 => {
                for (i, fs) in self.tet_faces.iter().enumerate() {
                    for (local, &f) in fs.iter().enumerate() {
                        trip.push((f, i, if local % 2 == 0 { 1 } else { -1 }));
                    }
                }
            }
            _ => return Err(ComplexError::BadDegree(k)),
        }
        Ok(CsrMatrix::from_triplets(self.count(k - 1), self.count(k), &trip))
    }

    /// Real coboundary d_k = ∂_{k+1}ᵀ acting on k-cochains.
    pub fn coboundary(&self, k: usize) -> Result<CsrMatrix<f64>, ComplexError> {
        Ok(self.boundary_matrix(k + 1)?.transpose().map(|v| v as f64))
    }

    /// Fundamental class: the sum of oriented top simplices.
    pub fn fundamental_class(&self) -> Chain {
        Chain::from_pairs(
            self.dim,
            self.orientation.iter().enumerate().map(|(i, &s)| (i, s as i64)),
        )
    }

    pub fn euler_characteristic(&self) -> i64 {
        (0..=3)
            .map(|k| {
                let c = self.count(k) as i64;
                if k % 2 == 0 {
                    c
                } else {
                    -c
                }
            })
            .sum()
    }

    /// Connected component label of each vertex, and the component count.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut label = vec![usize::MAX; self.n_vertices];
        let mut n = 0;
        for s in 0..self.n_vertices {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = n;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &e in &self.vertex_edges[v] {
                    let [a, b] = self.edges[e];
                    let w = if a == v { b } else { a };
                    if label[w] == usize::MAX {
                        label[w] = n;
                        stack.push(w);
                    }
                }
            }
            n += 1;
        }
        (label, n)
    }

    pub fn to_data(&self) -> ComplexData {
        if self.dim == 3 {
            ComplexData {
                vertex_count: self.n_vertices,
                tets: self.tets.clone(),
                triangles: Vec::new(),
                orientation: self.orientation.clone(),
            }
        } else {
            ComplexData {
                vertex_count: self.n_vertices,
                tets: Vec::new(),
                triangles: self.triangles.clone(),
                orientation: self.orientation.clone(),
            }
        }
    }

    pub fn from_data(data: &ComplexData) -> Result<Self, ComplexError> {
        let mut cx = if data.tets.is_empty() && !data.triangles.is_empty() {
            build_surface(data.vertex_count, &data.triangles)?
        } else {
            build_complex(data.vertex_count, &data.tets)?
        };
        if !data.orientation.is_empty() {
            cx.set_orientation(data.orientation.clone())?;
        }
        Ok(cx)
    }
}

/// Integer k-chain stored sparsely; zero coefficients are never kept.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    pub degree: usize,
    coefficients: BTreeMap<usize, i64>,
}

impl Chain {
    pub fn zero(degree: usize) -> Self {
        Self {
            degree,
            coefficients: BTreeMap::new(),
        }
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, i64)>>(degree: usize, pairs: I) -> Self {
        let mut c = Self::zero(degree);
        for (i, v) in pairs {
            c.add(i, v);
        }
        c
    }

    pub fn from_dense(degree: usize, values: &[i64]) -> Self {
        Self::from_pairs(degree, values.iter().copied().enumerate())
    }

    /// Oriented edge path through the given vertices.
    pub fn edge_path(cx: &SimplicialComplex, vertices: &[usize]) -> Option<Self> {
        let mut c = Self::zero(1);
        for w in vertices.windows(2) {
            let (e, s) = cx.edge_index(w[0], w[1])?;
            c.add(e, s);
        }
        Some(c)
    }

    pub fn add(&mut self, index: usize, value: i64) {
        if value == 0 {
            return;
        }
        let entry = self.coefficients.entry(index).or_insert(0);
        *entry += value;
        if *entry == 0 {
            self.coefficients.remove(&index);
        }
    }

    pub fn add_chain(&mut self, other: &Chain, scale: i64) {
        for (&i, &v) in &other.coefficients {
            self.add(i, scale * v);
        }
    }

    pub fn scaled(&self, s: i64) -> Chain {
        let mut c = Chain::zero(self.degree);
        c.add_chain(self, s);
        c
    }

    pub fn get(&self, index: usize) -> i64 {
        self.coefficients.get(&index).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.coefficients.iter().map(|(&i, &v)| (i, v))
    }

    pub fn to_dense(&self, len: usize) -> Vec<i64> {
        let mut v = vec![0; len];
        for (i, c) in self.iter() {
            v[i] = c;
        }
        v
    }

    pub fn to_real(&self, len: usize) -> Vec<f64> {
        let mut v = vec![0.0; len];
        for (i, c) in self.iter() {
            v[i] = c as f64;
        }
        v
    }

    /// Checks indices against the complex.
    pub fn validate(&self, cx: &SimplicialComplex) -> Result<(), ComplexError> {
        let count = cx.count(self.degree);
        match self.coefficients.keys().next_back() {
            Some(&i) if i >= count => Err(ComplexError::ChainIndex {
                degree: self.degree,
                index: i,
                count,
            }),
            _ => Ok(()),
        }
    }

    pub fn boundary(&self, cx: &SimplicialComplex) -> Result<Chain, ComplexError> {
        if self.degree == 0 {
            return Ok(Chain::zero(0));
        }
        self.validate(cx)?;
        let d = cx.boundary_matrix(self.degree)?.transpose();
        let mut out = Chain::zero(self.degree - 1);
        for (i, c) in self.iter() {
            let (rows, vals) = d.row(i);
            for (&r, &v) in rows.iter().zip(vals) {
                out.add(r, c * v);
            }
        }
        Ok(out)
    }

    /// Exact pairing with an integer cochain.
    pub fn pair(&self, cochain: &[i64]) -> i64 {
        self.iter().map(|(i, c)| c * cochain[i]).sum()
    }

    /// Pairing with a real cochain.
    pub fn pair_real(&self, cochain: &[f64]) -> f64 {
        self.iter().map(|(i, c)| c as f64 * cochain[i]).sum()
    }

    /// Weighted ℓ¹ norm Σ w_i |c_i|.
    pub fn weighted_l1(&self, weights: &[f64]) -> f64 {
        self.iter().map(|(i, c)| weights[i] * c.unsigned_abs() as f64).sum()
    }
}

/// Integer matrix product used to check ∂∂ = 0 exactly.
pub fn integer_product(a: &CsrMatrix<i64>, b: &CsrMatrix<i64>) -> CsrMatrix<i64> {
    assert_eq!(a.ncols(), b.nrows());
    let mut trip = Vec::new();
    for r in 0..a.nrows() {
        let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
        let (cols, vals) = a.row(r);
        for (&k, &x) in cols.iter().zip(vals) {
            let (bc, bv) = b.row(k);
            for (&c, &y) in bc.iter().zip(bv) {
                *acc.entry(c).or_insert(0) += x * y;
            }
        }
        trip.extend(acc.into_iter().map(|(c, v)| (r, c, v)));
    }
    CsrMatrix::from_triplets(a.nrows(), b.ncols(), &trip)
}

/// True when ∂_{k−1}∂_k vanishes exactly for every admissible k.
pub fn chain_complex_identity_holds(cx: &SimplicialComplex) -> bool {
    (2..=cx.dim()).all(|k| {
        let lo = cx.boundary_matrix(k - 1).expect("degree in range");
        let hi = cx.boundary_matrix(k).expect("degree in range");
        integer_product(&lo, &hi).nnz() == 0
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simplex_boundary() -> SimplicialComplex {
        let tets: Vec<[usize; 4]> = (0..5)
            .map(|skip| {
                let v: Vec<usize> = (0..5).filter(|&i| i != skip).collect();
                [v[0], v[1], v[2], v[3]]
            })
            .collect();
        build_complex(5, &tets).unwrap()
    }

    #[test]
    fn boundary_of_four_simplex_is_closed() {
        let cx = simplex_boundary();
        assert!(cx.is_closed_3manifold());
        assert_eq!(cx.count(1), 10);
        assert_eq!(cx.count(2), 10);
        assert_eq!(cx.euler_characteristic(), 0);
        assert!(chain_complex_identity_holds(&cx));
        // Fundamental class is a cycle.
        let z = cx.fundamental_class().boundary(&cx).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn single_tetrahedron_is_not_closed() {
        let cx = build_complex(4, &[[0, 1, 2, 3]]).unwrap();
        assert!(!cx.is_closed());
        assert_eq!(cx.count(2), 4);
        assert!(chain_complex_identity_holds(&cx));
    }

    #[test]
    fn three_cofaces_rejected() {
        let err = build_complex(6, &[[0, 1, 2, 3], [0, 1, 2, 4], [0, 1, 2, 5]]).unwrap_err();
        assert!(matches!(err, ComplexError::NotManifold { cofaces: 3, .. }));
    }

    #[test]
    fn duplicate_and_repeated_rejected() {
        assert!(matches!(
            build_complex(4, &[[0, 1, 2, 3], [3, 2, 1, 0]]),
            Err(ComplexError::Duplicate { .. })
        ));
        assert!(matches!(
            build_complex(4, &[[0, 1, 1, 3]]),
            Err(ComplexError::RepeatedVertex { .. })
        ));
        assert!(matches!(
            build_complex(4, &[[0, 1, 2, 7]]),
            Err(ComplexError::VertexOutOfRange { .. })
        ));
    }

    #[test]
    fn triangle_boundary_column() {
        let cx = build_surface(3, &[[0, 1, 2]]).unwrap();
        let d2 = cx.boundary_matrix(2).unwrap();
        let (e01, _) = cx.edge_index(0, 1).unwrap();
        let (e02, _) = cx.edge_index(0, 2).unwrap();
        let (e12, _) = cx.edge_index(1, 2).unwrap();
        assert_eq!(d2.get(e12, 0), 1);
        assert_eq!(d2.get(e02, 0), -1);
        assert_eq!(d2.get(e01, 0), 1);
    }

    #[test]
    fn tetrahedron_surface_sum_is_cycle() {
        let cx = build_surface(4, &[[1, 2, 3], [0, 3, 2], [0, 1, 3], [0, 2, 1]]).unwrap();
        assert!(cx.is_closed());
        let z = cx.fundamental_class().boundary(&cx).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn orientation_is_coherent_and_reversible() {
        let cx = simplex_boundary();
        let mut flipped = cx.clone();
        flipped.flip_orientation();
        assert!(flipped.fundamental_class().boundary(&flipped).unwrap().is_zero());
        let mut bad = cx.clone();
        let mut signs = cx.orientation().to_vec();
        signs[0] = -signs[0];
        assert!(bad.set_orientation(signs).is_err());
    }

    #[test]
    fn data_round_trip() {
        let cx = simplex_boundary();
        let back = SimplicialComplex::from_data(&cx.to_data()).unwrap();
        assert_eq!(back.tets(), cx.tets());
        assert_eq!(back.orientation(), cx.orientation());
        assert_eq!(back.to_data(), cx.to_data());
    }
}
