//! Flat unit 3-torus on an `N³` grid, each cube split into six tetrahedra
//! along its main diagonal.

use crate::complex::build_complex;
use crate::dec::{assemble_metric, CellGeometry, Geometry, MetricData, TetGeometry};

use super::ModelError;

/// Orders of the coordinate axes along the six Kuhn paths.
const PATHS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

pub fn vertex_index(n: usize, i: usize, j: usize, k: usize) -> usize {
    (i % n) + n * ((j % n) + n * (k % n))
}

/// Grid position of a vertex.
pub fn vertex_coords(n: usize, v: usize) -> [usize; 3] {
    [v % n, (v / n) % n, v / (n * n)]
}

/// Flat torus `R³ / Z³` with grid spacing `1/n`. Needs `n ≥ 3`; with `n = 2`
/// the grid identifications collapse distinct simplices.
pub fn flat_torus(n: usize) -> Result<MetricData, ModelError> {
    if n < 3 {
        return Err(ModelError::Resolution {
            model: "torus",
            min: 3,
            got: n,
        });
    }
    let h = 1.0 / n as f64;
    let mut tets = Vec::with_capacity(6 * n * n * n);
    let mut corners = Vec::with_capacity(6 * n * n * n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                for path in PATHS {
                    let mut p = [i, j, k];
                    let mut ids = [0usize; 4];
                    let mut pos = [[0.0; 3]; 4];
                    for step in 0..4 {
                        if step > 0 {
                            p[path[step - 1]] += 1;
                        }
                        ids[step] = vertex_index(n, p[0], p[1], p[2]);
                        pos[step] = p.map(|c| c as f64 * h);
                    }
                    // Corners listed in sorted vertex order.
                    let mut order = [0, 1, 2, 3];
                    order.sort_by_key(|&s| ids[s]);
                    tets.push(ids);
                    corners.push(order.map(|s| pos[s]));
                }
            }
        }
    }
    let mut cx = build_complex(n * n * n, &tets)?;
    let cells: Vec<TetGeometry> = corners
        .iter()
        .enumerate()
        .map(|(t, c)| TetGeometry::from_corners(c).ok_or(ModelError::Degenerate { tet: t }))
        .collect::<Result<_, _>>()?;
    cx.set_orientation(cells.iter().map(|g| g.orientation as i8).collect())?;
    let geometry = Geometry::Cells(CellGeometry {
        grams: cells.iter().map(|g| g.gram).collect(),
        measures: None,
        charts: Some(corners),
    });
    Ok(assemble_metric(cx, geometry)?)
}

/// Coefficients of the constant 1-form `c · dx` on the grid edges.
pub fn constant_form(m: &MetricData, n: usize, c: [f64; 3]) -> Vec<f64> {
    let h = 1.0 / n as f64;
    m.complex()
        .edges()
        .iter()
        .map(|&[a, b]| {
            let (pa, pb) = (vertex_coords(n, a), vertex_coords(n, b));
            (0..3)
                .map(|k| {
                    // Shortest periodic displacement, in grid units.
                    let mut d = pb[k] as i64 - pa[k] as i64;
                    if d > 1 {
                        d -= n as i64;
                    } else if d < -1 {
                        d += n as i64;
                    }
                    c[k] * d as f64 * h
                })
                .sum()
        })
        .collect()
}

/// Edge integrals of `a·cos(2πx) dy`, the lowest coexact eigenform family
/// of the flat torus, with the closed part removed by Hodge decomposition.
/// The result is discretely coexact, as the flow construction needs.
pub fn torus_eigenform(m: &MetricData, n: usize, a: f64) -> Result<Vec<f64>, ModelError> {
    use std::f64::consts::TAU;
    let h = 1.0 / n as f64;
    let raw: Vec<f64> = m
        .complex()
        .edges()
        .iter()
        .map(|&[u, v]| {
            let (pu, pv) = (vertex_coords(n, u), vertex_coords(n, v));
            let step = |k: usize| {
                let mut d = pv[k] as i64 - pu[k] as i64;
                if d > 1 {
                    d -= n as i64;
                } else if d < -1 {
                    d += n as i64;
                }
                d as f64 * h
            };
            let (x0, dx, dy) = (pu[0] as f64 * h, step(0), step(1));
            if dy == 0.0 {
                0.0
            } else if dx == 0.0 {
                a * dy * (TAU * x0).cos()
            } else {
                a * dy * ((TAU * (x0 + dx)).sin() - (TAU * x0).sin()) / (TAU * dx)
            }
        })
        .collect();
    Ok(crate::dec::hodge_decompose(m, 1, &raw, 1e-13)?.coexact)
}
