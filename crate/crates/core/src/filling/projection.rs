//! Reduction of piecewise-linear curves to the 1-skeleton by cone
//! constructions inside each tetrahedron.
//!
//! Every point is snapped to the vertex of its cell with the largest
//! barycentric weight. A straight piece `p → q` in a cell is replaced by the
//! edge `v(p) → v(q)`, and the quadrilateral `p, q, v(q), v(p)` is filled by
//! the two cone triangles `(p, q, v(q))` and `(p, v(q), v(p))`. Consecutive
//! pieces reuse the vertex chosen at their junction, so the triangles
//! telescope and the correction chain has boundary `curve − γ₁`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::complex::Chain;
use crate::dec::{mat_vec, whitney, MetricData, TetGeometry, Vec3};
use crate::flow::{snap_vertex, FlowCurve};

use super::FillingError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolySegment {
    pub tet: usize,
    pub p: [f64; 4],
    pub q: [f64; 4],
}

/// Off-skeleton triangle of the correction chain, in barycentric corners
/// of its tetrahedron.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeTriangle {
    pub tet: usize,
    pub corners: [[f64; 4]; 3],
    pub area: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub chain: Chain,
    pub correction_area: f64,
    pub correction: Vec<ConeTriangle>,
    pub curve_length: f64,
    pub skeleton_length: f64,
    /// `max(l(γ₁), correction area) / l(curve)`; zero for a point curve.
    pub constant: f64,
    pub first_vertex: Option<usize>,
    pub last_vertex: Option<usize>,
}

fn corner(i: usize) -> [f64; 4] {
    let mut c = [0.0; 4];
    c[i] = 1.0;
    c
}

fn triangle_area(g: &TetGeometry, a: &[f64; 4], b: &[f64; 4], c: &[f64; 4]) -> f64 {
    let u = TetGeometry::displacement(a, b);
    let v = TetGeometry::displacement(a, c);
    let gu: Vec3 = mat_vec(&g.gram, u);
    let uu = whitney::dot3(u, gu);
    let vv = whitney::dot3(v, mat_vec(&g.gram, v));
    let uv = whitney::dot3(v, gu);
    0.5 * (uu * vv - uv * uv).max(0.0).sqrt()
}

/// A barycentric point as weights on global vertices.
fn global_point(m: &MetricData, t: usize, p: &[f64; 4]) -> BTreeMap<usize, f64> {
    let mut out = BTreeMap::new();
    for (v, &w) in m.complex().tets()[t].iter().zip(p) {
        if w > 1e-12 {
            out.insert(*v, w);
        }
    }
    out
}

fn point_gap(a: &BTreeMap<usize, f64>, b: &BTreeMap<usize, f64>) -> f64 {
    let mut gap = 0.0f64;
    for (v, w) in a {
        gap = gap.max((w - b.get(v).copied().unwrap_or(0.0)).abs());
    }
    for (v, w) in b {
        if !a.contains_key(v) {
            gap = gap.max(w.abs());
        }
    }
    gap
}

/// Projects a connected polyline (open or closed) onto the 1-skeleton. The
/// returned chain has boundary `v(last) − v(first)`.
pub fn project_path(m: &MetricData, segments: &[PolySegment]) -> Result<Projection, FillingError> {
    let cx = m.complex();
    let mut chain = Chain::zero(1);
    let mut correction = Vec::new();
    let mut curve_length = 0.0;
    let mut prev: Option<(usize, BTreeMap<usize, f64>)> = None;
    let mut first_vertex = None;
    for (i, s) in segments.iter().enumerate() {
        if s.tet >= cx.count(3) {
            return Err(FillingError::InconsistentTrace { segment: i });
        }
        let verts = cx.tets()[s.tet];
        let entry = global_point(m, s.tet, &s.p);
        let a = match &prev {
            Some((v, exit)) => {
                if point_gap(exit, &entry) > 1e-9 || !verts.contains(v) {
                    return Err(FillingError::InconsistentTrace { segment: i });
                }
                *v
            }
            None => snap_vertex(cx, s.tet, &s.p),
        };
        first_vertex.get_or_insert(a);
        let b = snap_vertex(cx, s.tet, &s.q);
        let g = m.cell(s.tet);
        curve_length += g.segment_length(&s.p, &s.q);
        if a != b {
            let (e, sign) = cx
                .edge_index(a, b)
                .ok_or(FillingError::InconsistentTrace { segment: i })?;
            chain.add(e, sign);
        }
        let la = verts.iter().position(|&v| v == a).expect("vertex of tet");
        let lb = verts.iter().position(|&v| v == b).expect("vertex of tet");
        let (ca, cb) = (corner(la), corner(lb));
        for tri in [[s.p, s.q, cb], [s.p, cb, ca]] {
            let area = triangle_area(g, &tri[0], &tri[1], &tri[2]);
            if area > 0.0 {
                correction.push(ConeTriangle {
                    tet: s.tet,
                    corners: tri,
                    area,
                });
            }
        }
        prev = Some((b, global_point(m, s.tet, &s.q)));
    }
    let correction_area = correction.iter().map(|c| c.area).sum();
    let skeleton_length = m.chain_length(&chain);
    let constant = if curve_length > 0.0 {
        skeleton_length.max(correction_area) / curve_length
    } else {
        0.0
    };
    Ok(Projection {
        chain,
        correction_area,
        correction,
        curve_length,
        skeleton_length,
        constant,
        first_vertex,
        last_vertex: prev.map(|(v, _)| v),
    })
}

/// Projects a closed flow curve to an integer 1-cycle homologous to it.
pub fn project_to_skeleton(m: &MetricData, curve: &FlowCurve) -> Result<Projection, FillingError> {
    let segs: Vec<PolySegment> = curve
        .segments
        .iter()
        .map(|s| PolySegment {
            tet: s.tet,
            p: s.entry,
            q: s.exit,
        })
        .collect();
    let Some((first, last)) = segs.first().zip(segs.last()) else {
        return project_path(m, &segs);
    };
    let gap = point_gap(
        &global_point(m, last.tet, &last.q),
        &global_point(m, first.tet, &first.p),
    );
    if gap > 1e-9 {
        return Err(FillingError::NotClosed { gap });
    }
    // Close up at the first vertex: rotate the junction rule onto it.
    let mut proj = project_path(m, &segs)?;
    let (a, b) = (proj.first_vertex, proj.last_vertex);
    if let (Some(a), Some(b)) = (a, b) {
        if a != b {
            let (e, sign) = m
                .complex()
                .edge_index(b, a)
                .ok_or(FillingError::InconsistentTrace { segment: 0 })?;
            proj.chain.add(e, sign);
            proj.skeleton_length = m.chain_length(&proj.chain);
            if proj.curve_length > 0.0 {
                proj.constant = proj.skeleton_length.max(proj.correction_area) / proj.curve_length;
            }
        }
    }
    Ok(proj)
}
