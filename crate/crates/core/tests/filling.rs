use coexact::complex::{Chain, SimplicialComplex};
use coexact::dec::Measures;
use coexact::filling::{cheeger_estimate, min_filling_area, CheegerOptions, FillingOptions};
use coexact::homology::{classify_cycle, homology_basis};
use coexact::lp::LpStatus;
use coexact::models::fixtures::{octahedron_equator, octahedron_measures, rp2_measures};

/// Smallest `Σ area·|x|` over integer 2-chains with entries in `range` whose
/// boundary is `r·γ`, by exhaustive enumeration.
fn brute_force(cx: &SimplicialComplex, m: &Measures, gamma: &Chain, r: i64, range: i64) -> Option<f64> {
    let nf = cx.count(2);
    let target = gamma.scaled(r).to_dense(cx.count(1));
    let d2 = cx.boundary_matrix(2).unwrap().transpose();
    let vals: Vec<i64> = (-range..=range).collect();
    let total = vals.len().pow(nf as u32);
    let mut best: Option<f64> = None;
    let mut x = vec![0i64; nf];
    for code in 0..total {
        let mut c = code;
        for xi in x.iter_mut() {
            *xi = vals[c % vals.len()];
            c /= vals.len();
        }
        let mut bd = vec![0i64; cx.count(1)];
        for (f, &xf) in x.iter().enumerate() {
            if xf != 0 {
                let (edges, signs) = d2.row(f);
                for (&e, &s) in edges.iter().zip(signs) {
                    bd[e] += s * xf;
                }
            }
        }
        if bd == target {
            let area: f64 = x.iter().zip(&m.face_areas).map(|(a, w)| a.abs() as f64 * w).sum();
            if best.is_none_or(|b| area < b) {
                best = Some(area);
            }
        }
    }
    best.map(|a| a / r as f64)
}

#[test]
fn zero_cycle_has_zero_area() {
    let (cx, m) = octahedron_measures();
    let h = homology_basis(&cx).unwrap();
    let f = min_filling_area(&cx, &m.face_areas, &h, &Chain::zero(1), &FillingOptions::default()).unwrap();
    assert_eq!(f.area, 0.0);
    assert!(f.chain.is_empty());
}

#[test]
fn octahedron_equator_fills_with_a_hemisphere() {
    let (cx, m) = octahedron_measures();
    let h = homology_basis(&cx).unwrap();
    let gamma = octahedron_equator(&cx);
    let f = min_filling_area(&cx, &m.face_areas, &h, &gamma, &FillingOptions::default()).unwrap();
    let oracle = brute_force(&cx, &m, &gamma, 1, 1).unwrap();
    assert!((oracle - 2.0 * 3f64.sqrt()).abs() < 1e-12);
    assert!((f.area - oracle).abs() < 1e-9, "{} vs {}", f.area, oracle);
    assert_eq!(f.r_used, 1);
    assert_eq!(f.lp_status, LpStatus::Optimal);
    assert!(f.boundary_residual <= 1e-9);
    assert!(f.integrality_gap.unwrap().abs() < 1e-9);
}

#[test]
fn rp2_core_loop_needs_r_two() {
    let (cx, m) = rp2_measures();
    let h = homology_basis(&cx).unwrap();
    let gamma = h.torsion_cycles[0].clone();
    let class = classify_cycle(&cx, &h, &gamma).unwrap();
    assert_eq!(class.trivial_order.finite(), Some(2));
    let f = min_filling_area(&cx, &m.face_areas, &h, &gamma, &FillingOptions::default()).unwrap();
    assert_eq!(f.r_used, 2);
    assert!(f.boundary_residual <= 1e-9);
    // The integer optimum lives in {−1, 0, 1}: the real filling is unique.
    let oracle = brute_force(&cx, &m, &gamma, 2, 1).unwrap();
    assert!((f.area - oracle).abs() < 1e-9, "{} vs {}", f.area, oracle);
    assert!(f.integrality_gap.unwrap().abs() < 1e-9);
}

#[test]
fn nontrivial_cycle_is_rejected() {
    // Annulus: the core circle does not bound.
    let cx = coexact::complex::build_surface(
        6,
        &[[0, 1, 4], [1, 2, 5], [2, 0, 3], [0, 4, 3], [1, 5, 4], [2, 3, 5]],
    )
    .unwrap();
    let h = homology_basis(&cx).unwrap();
    let gamma = Chain::edge_path(&cx, &[0, 1, 2, 0]).unwrap();
    let areas = vec![1.0; cx.count(2)];
    assert!(min_filling_area(&cx, &areas, &h, &gamma, &FillingOptions::default()).is_err());
}

#[test]
fn subadditivity_on_octahedron() {
    let (cx, m) = octahedron_measures();
    let h = homology_basis(&cx).unwrap();
    let opts = FillingOptions::default();
    let g1 = Chain::edge_path(&cx, &[0, 2, 4, 0]).unwrap();
    let g2 = Chain::edge_path(&cx, &[0, 4, 3, 0]).unwrap();
    let mut g = g1.clone();
    g.add_chain(&g2, 1);
    let a = |c: &Chain| min_filling_area(&cx, &m.face_areas, &h, c, &opts).unwrap().area;
    assert!(a(&g) <= a(&g1) + a(&g2) + 1e-12);
}

#[test]
fn stokes_pairing_matches_boundary() {
    let (cx, m) = octahedron_measures();
    let h = homology_basis(&cx).unwrap();
    let gamma = octahedron_equator(&cx);
    let f = min_filling_area(&cx, &m.face_areas, &h, &gamma, &FillingOptions::default()).unwrap();
    // Any coboundary pairs with ∂S as with r·γ.
    let phi: Vec<f64> = (0..cx.vertex_count()).map(|v| (v * v) as f64 + 0.5).collect();
    let d0 = cx.coboundary(0).unwrap();
    let beta = d0.mul_vec(&phi);
    let d1 = cx.coboundary(1).unwrap();
    let dbeta = d1.mul_vec(&beta);
    let on_s: f64 = f.chain.iter().map(|&(t, c)| c * dbeta[t]).sum();
    assert!(on_s.abs() < 1e-12);
    let bd = cx.boundary_matrix(2).unwrap();
    let mut bd_s = vec![0.0; cx.count(1)];
    for &(t, c) in &f.chain {
        for (e, tt, s) in bd.iter() {
            if tt == t {
                bd_s[e] += s as f64 * c;
            }
        }
    }
    let lhs: f64 = bd_s.iter().zip(&beta).map(|(a, b)| a * b).sum();
    let rhs = gamma.pair_real(&beta) * f.r_used as f64;
    assert!((lhs - rhs).abs() < 1e-9);
}

#[test]
fn cheeger_is_monotone_in_budget() {
    let (cx, m) = octahedron_measures();
    let h = homology_basis(&cx).unwrap();
    let small = CheegerOptions {
        max_fundamental: 1,
        short_roots: 1,
        short_per_root: 1,
        ..CheegerOptions::default()
    };
    let large = CheegerOptions::default();
    let a = cheeger_estimate(&cx, &m, &h, &[], &small).unwrap();
    let b = cheeger_estimate(&cx, &m, &h, &[octahedron_equator(&cx)], &large).unwrap();
    assert!(b.cycles_examined >= a.cycles_examined);
    assert!(b.h1_upper <= a.h1_upper + 1e-12);
    // Equator: length 4√2 over area 2√3.
    assert!(b.h1_upper <= 4.0 * 2f64.sqrt() / (2.0 * 3f64.sqrt()) + 1e-9);
    assert!(b.to_csv().starts_with("cycle_id,source,length,r,area,ratio\n"));
}
