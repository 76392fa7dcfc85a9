//! Whitney forms on a single tetrahedron.
//!
//! Everything is expressed in the reference coordinates `ξ = (λ₁, λ₂, λ₃)` of
//! a tetrahedron whose vertices are listed in sorted global order, so
//! `dλ₀ = (−1, −1, −1)` and `dλᵢ = eᵢ`. Covectors are 3-vectors of `dξ`
//! components, 2-forms are stored as `(ω₂₃, ω₃₁, ω₁₂)`, and 3-forms as the
//! coefficient of `dξ₁∧dξ₂∧dξ₃`.

use crate::complex::{TET_EDGES, TET_FACES};

use super::metric::TetGeometry;

pub type Vec3 = [f64; 3];

/// `dλᵢ` in reference coordinates.
pub const GRAD_LAMBDA: [Vec3; 4] = [
    [-1.0, -1.0, -1.0],
    [1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, 0.0, 1.0],
];

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn dot3(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// `∫_T λₓ λᵧ dμ / vol(T)`
fn lambda_product(x: usize, y: usize) -> f64 {
    if x == y {
        1.0 / 10.0
    } else {
        1.0 / 20.0
    }
}

/// Terms `coef · λₓ dλₚ` of the Whitney 1-form of local edge `e`.
fn one_form_terms(e: usize) -> [(usize, usize, f64); 2] {
    let [a, b] = TET_EDGES[e];
    [(a, b, 1.0), (b, a, -1.0)]
}

/// Terms `coef · λₓ dλₚ∧dλ_q` of the Whitney 2-form of local face `f`.
fn two_form_terms(f: usize) -> [(usize, usize, usize, f64); 3] {
    let [a, b, c] = TET_FACES[f];
    [(a, b, c, 2.0), (b, a, c, -2.0), (c, a, b, 2.0)]
}

/// `∫ λᵢ λⱼ` mass matrix of the hat functions.
pub fn local_mass0(g: &TetGeometry) -> [[f64; 4]; 4] {
    let mut m = [[0.0; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = g.volume * lambda_product(i, j);
        }
    }
    m
}

/// Whitney 1-form mass matrix, local edges in `TET_EDGES` order.
pub fn local_mass1(g: &TetGeometry) -> [[f64; 6]; 6] {
    let mut m = [[0.0; 6]; 6];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (x, p, cp) in one_form_terms(i) {
                for (y, q, cq) in one_form_terms(j) {
                    acc += cp * cq * lambda_product(x, y) * g.grad_dot[p][q];
                }
            }
            *v = g.volume * acc;
        }
    }
    m
}

/// Whitney 2-form mass matrix, local faces in `TET_FACES` order.
pub fn local_mass2(g: &TetGeometry) -> [[f64; 4]; 4] {
    let gd = &g.grad_dot;
    let mut m = [[0.0; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (x, p, q, c1) in two_form_terms(i) {
                for (y, r, s, c2) in two_form_terms(j) {
                    let inner = gd[p][r] * gd[q][s] - gd[p][s] * gd[q][r];
                    acc += c1 * c2 * lambda_product(x, y) * inner;
                }
            }
            *v = g.volume * acc;
        }
    }
    m
}

/// Whitney 3-form mass: `1 / vol`.
pub fn local_mass3(g: &TetGeometry) -> f64 {
    1.0 / g.volume
}

/// `C[f][e] = ∫_T W_f ∧ W_e` with `T` carrying orientation `orientation`
/// relative to its sorted vertex order. Metric-free.
pub fn local_wedge21(orientation: f64) -> [[f64; 6]; 4] {
    let mut c = [[0.0; 6]; 4];
    for (f, row) in c.iter_mut().enumerate() {
        for (e, v) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (x, p, q, c1) in two_form_terms(f) {
                for (y, r, c2) in one_form_terms(e) {
                    let vol = dot3(cross(GRAD_LAMBDA[p], GRAD_LAMBDA[q]), GRAD_LAMBDA[r]);
                    // ∫ over the reference simplex of λₓλᵧ is (1 + δ)/120.
                    let integral = if x == y { 2.0 / 120.0 } else { 1.0 / 120.0 };
                    acc += c1 * c2 * vol * integral;
                }
            }
            *v = orientation * acc;
        }
    }
    c
}

/// Value of `Σ λᵢ fᵢ`.
pub fn eval0(coeffs: &[f64; 4], bary: &[f64; 4]) -> f64 {
    coeffs.iter().zip(bary).map(|(c, l)| c * l).sum()
}

/// Whitney 1-form with local edge coefficients, as a `dξ` covector.
pub fn eval1(coeffs: &[f64; 6], bary: &[f64; 4]) -> Vec3 {
    let mut out = [0.0; 3];
    for (e, &c) in coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        for (x, p, s) in one_form_terms(e) {
            for k in 0..3 {
                out[k] += c * s * bary[x] * GRAD_LAMBDA[p][k];
            }
        }
    }
    out
}

/// Whitney 2-form with local face coefficients, as `(ω₂₃, ω₃₁, ω₁₂)`.
pub fn eval2(coeffs: &[f64; 4], bary: &[f64; 4]) -> Vec3 {
    let mut out = [0.0; 3];
    for (f, &c) in coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        for (x, p, q, s) in two_form_terms(f) {
            let w = cross(GRAD_LAMBDA[p], GRAD_LAMBDA[q]);
            for k in 0..3 {
                out[k] += c * s * bary[x] * w[k];
            }
        }
    }
    out
}

/// Whitney 3-form coefficient of `dξ₁∧dξ₂∧dξ₃` (sorted orientation).
pub fn eval3(coeff: f64) -> f64 {
    6.0 * coeff
}

/// Exterior derivative of the Whitney 1-form: constant 2-form
/// `Σ cₑ · 2 dλₐ∧dλ_b`.
pub fn d_of_1form(coeffs: &[f64; 6]) -> Vec3 {
    let mut out = [0.0; 3];
    for (e, &c) in coeffs.iter().enumerate() {
        let [a, b] = TET_EDGES[e];
        let w = cross(GRAD_LAMBDA[a], GRAD_LAMBDA[b]);
        for k in 0..3 {
            out[k] += 2.0 * c * w[k];
        }
    }
    out
}

/// `∫ W` along the straight segment from barycentric `p` to `q`. Exact,
/// since the integrand is linear along the segment.
pub fn segment_integral1(coeffs: &[f64; 6], p: &[f64; 4], q: &[f64; 4]) -> f64 {
    let mut acc = 0.0;
    for (e, &c) in coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let [a, b] = TET_EDGES[e];
        let (ma, mb) = (0.5 * (p[a] + q[a]), 0.5 * (p[b] + q[b]));
        acc += c * (ma * (q[b] - p[b]) - mb * (q[a] - p[a]));
    }
    acc
}

/// Symmetric 4-point quadrature of degree 2 on a tetrahedron
/// (barycentric points, weights relative to the volume).
pub fn quadrature_points() -> [([f64; 4], f64); 4] {
    const A: f64 = 0.585_410_196_624_968_5;
    const B: f64 = 0.138_196_601_125_010_5;
    [
        ([A, B, B, B], 0.25),
        ([B, A, B, B], 0.25),
        ([B, B, A, B], 0.25),
        ([B, B, B, A], 0.25),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_tet() -> TetGeometry {
        TetGeometry::from_gram([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], 1.0).unwrap()
    }

    #[test]
    fn whitney_one_forms_integrate_to_one_on_their_edge() {
        for e in 0..6 {
            let [a, b] = TET_EDGES[e];
            let mut coeffs = [0.0; 6];
            coeffs[e] = 1.0;
            let mut p = [0.0; 4];
            let mut q = [0.0; 4];
            p[a] = 1.0;
            q[b] = 1.0;
            assert!((segment_integral1(&coeffs, &p, &q) - 1.0).abs() < 1e-15);
            for other in 0..6 {
                if other != e {
                    let [c, d] = TET_EDGES[other];
                    let mut p = [0.0; 4];
                    let mut q = [0.0; 4];
                    p[c] = 1.0;
                    q[d] = 1.0;
                    assert!(segment_integral1(&coeffs, &p, &q).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn mass0_sums_to_volume() {
        let g = unit_tet();
        let total: f64 = local_mass0(&g).iter().flatten().sum();
        assert!((total - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn mass1_matches_quadrature() {
        // Degree-2 quadrature integrates products of linear forms exactly.
        let g = unit_tet();
        let m = local_mass1(&g);
        for i in 0..6 {
            for j in 0..6 {
                let mut ci = [0.0; 6];
                let mut cj = [0.0; 6];
                ci[i] = 1.0;
                cj[j] = 1.0;
                let q: f64 = quadrature_points()
                    .iter()
                    .map(|(b, w)| w * g.volume * g.inner1(eval1(&ci, b), eval1(&cj, b)))
                    .sum();
                assert!((q - m[i][j]).abs() < 1e-14, "{i} {j}");
            }
        }
    }

    #[test]
    fn mass2_matches_quadrature() {
        let g = TetGeometry::from_gram([[2.0, 0.3, 0.1], [0.3, 1.0, -0.2], [0.1, -0.2, 1.5]], 1.0)
            .unwrap();
        let m = local_mass2(&g);
        for i in 0..4 {
            for j in 0..4 {
                let mut ci = [0.0; 4];
                let mut cj = [0.0; 4];
                ci[i] = 1.0;
                cj[j] = 1.0;
                let q: f64 = quadrature_points()
                    .iter()
                    .map(|(b, w)| w * g.volume * g.inner2(eval2(&ci, b), eval2(&cj, b)))
                    .sum();
                assert!((q - m[i][j]).abs() < 1e-13, "{i} {j}");
            }
        }
    }

    #[test]
    fn derivative_matches_whitney_two_form() {
        // d W_ab = W_{∂ᵀ}: check d(Whitney 1-form) equals Whitney 2-form of
        // the coboundary at an arbitrary point.
        let coeffs = [0.3, -1.2, 0.7, 2.0, 0.1, -0.4];
        let mut face = [0.0; 4];
        for (f, verts) in TET_FACES.iter().enumerate() {
            let e = |a: usize, b: usize| TET_EDGES.iter().position(|x| *x == [a, b]).unwrap();
            let [a, b, c] = *verts;
            face[f] = coeffs[e(b, c)] - coeffs[e(a, c)] + coeffs[e(a, b)];
        }
        let d = d_of_1form(&coeffs);
        let w = eval2(&face, &[0.1, 0.2, 0.3, 0.4]);
        for k in 0..3 {
            assert!((d[k] - w[k]).abs() < 1e-14);
        }
    }
}
