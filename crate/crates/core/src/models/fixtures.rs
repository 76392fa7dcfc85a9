//! Small fixed complexes used as oracles.

use crate::complex::{build_complex, build_surface, Chain, SimplicialComplex};
use crate::dec::Measures;

/// Boundary of the 4-simplex, a triangulated 3-sphere.
pub fn four_simplex_boundary() -> SimplicialComplex {
    let tets: Vec<[usize; 4]> = (0..5)
        .map(|skip| {
            let v: Vec<usize> = (0..5).filter(|&i| i != skip).collect();
            [v[0], v[1], v[2], v[3]]
        })
        .collect();
    build_complex(5, &tets).expect("valid fixture")
}

/// Unit right tetrahedron with vertices `0, e₁, e₂, e₃`.
pub fn single_tetrahedron() -> (SimplicialComplex, Vec<[f64; 3]>) {
    (
        build_complex(4, &[[0, 1, 2, 3]]).expect("valid fixture"),
        vec![[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    )
}

/// Unit octahedron surface: vertices `±eᵢ` in the order `+x, −x, +y, −y,
/// +z, −z`, faces outward oriented.
pub fn octahedron() -> (SimplicialComplex, Vec<[f64; 3]>) {
    let pos = vec![
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ];
    let mut tris = Vec::new();
    for sz in [1i32, -1] {
        for sy in [1i32, -1] {
            for sx in [1i32, -1] {
                let x = if sx > 0 { 0 } else { 1 };
                let y = if sy > 0 { 2 } else { 3 };
                let z = if sz > 0 { 4 } else { 5 };
                tris.push(if sx * sy * sz > 0 { [x, y, z] } else { [x, z, y] });
            }
        }
    }
    (build_surface(6, &tris).expect("valid fixture"), pos)
}

pub fn octahedron_measures() -> (SimplicialComplex, Measures) {
    let (cx, pos) = octahedron();
    let m = Measures::from_positions(&cx, &pos);
    (cx, m)
}

/// Equator `+x → +y → −x → −y → +x` of the octahedron.
pub fn octahedron_equator(cx: &SimplicialComplex) -> Chain {
    Chain::edge_path(cx, &[0, 2, 1, 3, 0]).expect("edges exist")
}

/// The six-vertex real projective plane.
pub fn rp2() -> SimplicialComplex {
    let tris = [
        [0, 1, 2],
        [0, 2, 3],
        [0, 3, 4],
        [0, 4, 5],
        [0, 5, 1],
        [1, 2, 4],
        [2, 3, 5],
        [3, 4, 1],
        [4, 5, 2],
        [5, 1, 3],
    ];
    build_surface(6, &tris).expect("valid fixture")
}

/// RP² with every edge of unit length and every triangle of area √3/4.
pub fn rp2_measures() -> (SimplicialComplex, Measures) {
    let cx = rp2();
    let m = Measures {
        edge_lengths: vec![1.0; cx.count(1)],
        face_areas: vec![3f64.sqrt() / 4.0; cx.count(2)],
    };
    (cx, m)
}

/// Boundary of the unit right tetrahedron, a 4-triangle 2-sphere.
pub fn tetrahedron_surface() -> (SimplicialComplex, Measures) {
    let (_, pos) = single_tetrahedron();
    let cx = build_surface(4, &[[1, 2, 3], [0, 3, 2], [0, 1, 3], [0, 2, 1]]).expect("valid fixture");
    let m = Measures::from_positions(&cx, &pos);
    (cx, m)
}

/// Möbius' seven-vertex torus: triangles `{i, i+1, i+3}` and
/// `{i, i+2, i+3}` mod 7. Measures are fixed uneven weights so that
/// optimal fillings are unique.
pub fn seven_vertex_torus() -> (SimplicialComplex, Measures) {
    let mut tris = Vec::with_capacity(14);
    for i in 0..7 {
        tris.push([i, (i + 1) % 7, (i + 3) % 7]);
        tris.push([i, (i + 3) % 7, (i + 2) % 7]);
    }
    let cx = build_surface(7, &tris).expect("valid fixture");
    let m = Measures {
        edge_lengths: (0..cx.count(1)).map(|e| 1.0 + 0.1 * ((5 * e) % 7) as f64).collect(),
        face_areas: (0..cx.count(2)).map(|f| 1.0 + 0.1 * ((3 * f) % 7) as f64 + 0.01 * f as f64).collect(),
    };
    (cx, m)
}
