use coexact::complex::build_complex;
use coexact::dec::{assemble_metric, Geometry, MetricData};
use coexact::filling::{project_path, project_to_skeleton, PolySegment};
use coexact::flow::montecarlo::{occupation_deviation, sample_trajectories};
use coexact::flow::{
    build_vector_field, close_and_unroll, integrate_trajectory, run_monte_carlo, ClosingOptions,
    MonteCarloConfig, TrajectoryOptions, VectorField,
};
use coexact::homology::homology_basis;
use coexact::models::torus::{constant_form, flat_torus, torus_eigenform};

fn wrap(x: f64) -> f64 {
    x.rem_euclid(1.0)
}

fn periodic_gap(a: [f64; 3], b: [f64; 3]) -> f64 {
    (0..3)
        .map(|k| {
            let d = wrap(a[k] - b[k]);
            d.min(1.0 - d)
        })
        .fold(0.0, f64::max)
}

#[test]
fn constant_field_moves_by_v() {
    let m = flat_torus(4).unwrap();
    let v = [0.31, -0.17, 0.23];
    let field = VectorField::from_ambient(&m, |_| v).unwrap();
    let bary = [0.1, 0.2, 0.3, 0.4];
    let c = integrate_trajectory(&m, &field, 5, bary, 1.0, &TrajectoryOptions::default()).unwrap();
    let x0 = m.position(5, &bary).unwrap();
    let (t, q) = c.end();
    let x1 = m.position(t, &q).unwrap();
    let target = [x0[0] + v[0], x0[1] + v[1], x0[2] + v[2]];
    assert!(periodic_gap(x1, target) < 1e-9);
    let speed = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    assert!((c.length - speed).abs() < 1e-9);
    let times: f64 = c.segments.iter().map(|s| s.t1 - s.t0).sum();
    assert!((times - 1.0).abs() < 1e-12);
}

#[test]
fn time_reversal_returns_to_start() {
    let n = 4;
    let m = flat_torus(n).unwrap();
    let alpha = torus_eigenform(&m, n, 1.0).unwrap();
    let field = build_vector_field(&m, &alpha).unwrap();
    let opts = TrajectoryOptions::default();
    let bary = [0.13, 0.27, 0.41, 0.19];
    let fwd = integrate_trajectory(&m, &field, 17, bary, 0.7, &opts).unwrap();
    let (t, q) = fwd.end();
    let back = integrate_trajectory(&m, &field.negated(), t, q, 0.7, &opts).unwrap();
    let (t2, q2) = back.end();
    let x0 = m.position(17, &bary).unwrap();
    let x2 = m.position(t2, &q2).unwrap();
    assert!(periodic_gap(x0, x2) < 1e-9);
}

#[test]
fn field_is_divergence_free_and_flux_single_valued() {
    let n = 3;
    let m = flat_torus(n).unwrap();
    let alpha = torus_eigenform(&m, n, 1.0).unwrap();
    let field = build_vector_field(&m, &alpha).unwrap();
    let flux = field.flux.as_ref().unwrap();
    let div = m.d(2).mul_vec(flux);
    assert!(div.iter().all(|v| v.abs() < 1e-12));
    // Flux through each face read from both cofaces agrees.
    let cx = m.complex();
    for f in 0..cx.count(2) {
        let mut seen = Vec::new();
        for &(t, local) in cx.triangle_cofaces(f) {
            // Outflow rate through the face is −dλ/dt times a positive factor.
            let rate = field.rates(t)[local];
            seen.push(rate);
        }
        assert_eq!(seen.len(), 2);
        assert!(seen[0] * seen[1] <= 1e-12, "flux should leave one cell and enter the other");
    }
}

#[test]
fn zero_form_gives_zero_field() {
    let m = flat_torus(3).unwrap();
    let phi: Vec<f64> = (0..m.complex().vertex_count()).map(|v| v as f64).collect();
    let exact = m.d(0).mul_vec(&phi);
    let field = build_vector_field(&m, &exact).unwrap();
    assert!(field.is_zero());
    let c = integrate_trajectory(&m, &field, 0, [0.25; 4], 2.0, &TrajectoryOptions::default()).unwrap();
    assert!(c.stalled);
    assert_eq!(c.length, 0.0);
}

#[test]
fn single_chord_projects_to_one_edge() {
    let cx = build_complex(4, &[[0, 1, 2, 3]]).unwrap();
    let pos = vec![[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let m: MetricData = assemble_metric(cx, Geometry::Embedding(pos)).unwrap();
    let p = [0.7, 0.1, 0.1, 0.1];
    let q = [0.1, 0.1, 0.1, 0.7];
    let proj = project_path(&m, &[PolySegment { tet: 0, p, q }]).unwrap();
    assert_eq!(proj.chain.len(), 1);
    let (e, _) = m.complex().edge_index(0, 3).unwrap();
    assert_eq!(proj.chain.get(e), 1);
    // Exact oracle: p = (0.1, 0.1, 0.1), q = (0.1, 0.1, 0.7) in R³.
    let x = |b: [f64; 4]| [b[1], b[2], b[3]];
    let area = |a: [f64; 3], b: [f64; 3], c: [f64; 3]| {
        let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
        let w = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
        0.5 * (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt()
    };
    let (v0, v3) = ([0.0; 3], [0.0, 0.0, 1.0]);
    let expected = area(x(p), x(q), v3) + area(x(p), v3, v0);
    assert_eq!(proj.correction.len(), 2);
    assert!((proj.correction_area - expected).abs() < 1e-12);
    assert!(proj.constant.is_finite() && proj.constant > 0.0);
}

#[test]
fn chain_along_edges_is_unchanged() {
    let m = flat_torus(3).unwrap();
    let cx = m.complex();
    let t = 0;
    let verts = cx.tets()[t];
    let corner = |i: usize| {
        let mut c = [0.0; 4];
        c[i] = 1.0;
        c
    };
    let segs = [
        PolySegment { tet: t, p: corner(0), q: corner(1) },
        PolySegment { tet: t, p: corner(1), q: corner(2) },
        PolySegment { tet: t, p: corner(2), q: corner(0) },
    ];
    let proj = project_path(&m, &segs).unwrap();
    let expected = coexact::complex::Chain::edge_path(cx, &[verts[0], verts[1], verts[2], verts[0]]).unwrap();
    assert_eq!(proj.chain, expected);
    assert!(proj.correction_area < 1e-15);
}

#[test]
fn diagonal_loop_projects_to_short_staircase() {
    let n = 4;
    let m = flat_torus(n).unwrap();
    let field = VectorField::from_ambient(&m, |_| [1.0, 1.0, 0.0]).unwrap();
    // Generic start off every edge and face.
    let start = (0..m.complex().count(3))
        .find(|&t| m.position(t, &[0.25; 4]).is_some())
        .unwrap();
    let bary = [0.31, 0.22, 0.26, 0.21];
    let c = integrate_trajectory(&m, &field, start, bary, 1.0, &TrajectoryOptions::default()).unwrap();
    let proj = project_to_skeleton(&m, &c).unwrap();
    let ratio = proj.skeleton_length / c.length;
    assert!(ratio <= 2f64.sqrt() + 1e-9, "ratio {ratio}");
    assert!(proj.chain.boundary(m.complex()).unwrap().is_zero());
}

#[test]
fn open_curve_is_rejected() {
    let m = flat_torus(3).unwrap();
    let field = VectorField::from_ambient(&m, |_| [0.3, 0.1, 0.05]).unwrap();
    let c = integrate_trajectory(&m, &field, 0, [0.25; 4], 0.5, &TrajectoryOptions::default()).unwrap();
    assert!(project_to_skeleton(&m, &c).is_err());
}

#[test]
fn winding_trajectory_unrolls_to_zero() {
    let n = 4;
    let m = flat_torus(n).unwrap();
    let h = homology_basis(m.complex()).unwrap();
    let w = 3.0;
    let field = VectorField::from_ambient(&m, |_| [w, 0.0, 0.0]).unwrap();
    let bary = [0.31, 0.22, 0.26, 0.21];
    let c = integrate_trajectory(&m, &field, 7, bary, 1.0, &TrajectoryOptions::default()).unwrap();
    let cons = close_and_unroll(&m, &h, vec![c], &ClosingOptions::default()).unwrap();
    // The removed class winds 3 times along x: read it with the closed
    // forms dx, dy, dz.
    for (k, expected) in [(0, 3.0), (1, 0.0), (2, 0.0)] {
        let mut c = [0.0; 3];
        c[k] = 1.0;
        let form = constant_form(&m, n, c);
        let winding: f64 = cons
            .unrolling
            .iter()
            .zip(&h.cycles)
            .map(|(&cj, z)| cj as f64 * z.pair_real(&form))
            .sum();
        assert!((winding - expected).abs() < 1e-9, "axis {k}: {winding}");
    }
    assert!(cons.homology_residual <= 1e-6 * cons.length());
    assert!(cons.rounding_residual < 1e-9);
    let fill = cons.filling.as_ref().unwrap();
    assert!(fill.boundary_residual < 1e-8);
    // Budget: snaps and connectors bounded by twice the diameter per curve.
    let diameter = 3f64.sqrt() / 2.0;
    assert!(cons.snap_length + cons.connector_length <= 2.0 * diameter + 1e-9);
}

#[test]
fn closed_trajectory_needs_no_connector() {
    let n = 4;
    let m = flat_torus(n).unwrap();
    let h = homology_basis(m.complex()).unwrap();
    let field = VectorField::from_ambient(&m, |_| [0.0, 0.0, 0.0]).unwrap();
    let c = integrate_trajectory(&m, &field, 3, [1.0, 0.0, 0.0, 0.0], 1.0, &TrajectoryOptions::default()).unwrap();
    let cons = close_and_unroll(&m, &h, vec![c], &ClosingOptions::default()).unwrap();
    assert!(cons.unrolling.iter().all(|&c| c == 0));
    assert_eq!(cons.connector_length, 0.0);
    assert_eq!(cons.nu_part_length, 0.0);
}

#[test]
fn monte_carlo_small_run_is_consistent_and_reproducible() {
    let n = 4;
    let m = flat_torus(n).unwrap();
    let h = homology_basis(m.complex()).unwrap();
    let alpha = torus_eigenform(&m, n, 1.0).unwrap();
    let cfg = MonteCarloConfig {
        n: 64,
        time: 1.0,
        seed: 11,
        ..MonteCarloConfig::default()
    };
    let a = run_monte_carlo(&m, &h, &alpha, &cfg).unwrap();
    let b = run_monte_carlo(&m, &h, &alpha, &cfg).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert!(a.estimates.homology_residual <= 1e-6 * a.curve_length.unwrap());
    assert!(a.errors.alpha_l2sq_via_beta < 4.0 * a.stderr_beta + 1e-9, "{a:#?}");
    assert!(a.errors.dalpha_l1_via_length < 4.0 * a.stderr_length + 1e-9, "{a:#?}");
    assert!(a.beta_fit_residual < 0.3 && a.beta_normalization > 0.5 && a.beta_normalization < 2.0);
}

#[test]
fn ensemble_occupation_matches_volume() {
    let n = 4;
    let m = flat_torus(n).unwrap();
    let alpha = torus_eigenform(&m, n, 1.0).unwrap();
    let field = build_vector_field(&m, &alpha).unwrap();
    let curves = sample_trajectories(&m, &field, 2048, 4.0, 3, &TrajectoryOptions::default()).unwrap();
    let dev = occupation_deviation(&m, &curves, 8);
    assert!(dev < 0.1, "deviation {dev}");
}
