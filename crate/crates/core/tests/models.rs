use std::f64::consts::PI;

use coexact::filling::{cheeger_estimate, min_filling_area, CheegerOptions, FillingOptions};
use coexact::homology::homology_basis;
use coexact::models::berger::{berger_h1_bounds, berger_mesh, berger_spectrum_invariant, BergerModel};
use coexact::models::cusp::{cusp_eigenvalue, cusp_mesh, CuspModel};
use coexact::spectra::{coexact_spectrum, SpectralOptions};
use proptest::prelude::*;

#[test]
fn berger_invariant_spectrum_matches_closed_form() {
    for eps in [1.0, 0.5, 0.25, 0.1] {
        let ev = berger_spectrum_invariant(&BergerModel::new(eps).unwrap()).unwrap();
        assert!((ev[0] - 4.0 * eps * eps).abs() < 1e-12);
        // The horizontal invariant forms sit at 4/ε².
        assert!((ev[1] - 4.0 / (eps * eps)).abs() < 1e-12 * ev[1]);
    }
    let b = BergerModel::new(0.5).unwrap();
    assert_eq!(b.d_alpha_area_coefficient(), 2.0);
    assert_eq!(b.base_area(), PI);
}

#[test]
fn berger_bounds_and_range() {
    assert_eq!(berger_h1_bounds(&BergerModel { epsilon: 0.1 }).unwrap(), (0.2, PI));
    assert_eq!(berger_h1_bounds(&BergerModel { epsilon: 1.0 }).unwrap(), (2.0, PI));
    assert!(BergerModel::new(0.0).is_err());
    assert!(BergerModel::new(1.5).is_err());
    assert!(berger_h1_bounds(&BergerModel { epsilon: -1.0 }).is_err());
    assert!(berger_mesh(&BergerModel::new(0.5).unwrap(), 3).is_err());
}

#[test]
fn berger_mesh_topology_and_fibre() {
    let eps = 0.5;
    let b = berger_mesh(&BergerModel::new(eps).unwrap(), 4).unwrap();
    let h = homology_basis(b.metric.complex()).unwrap();
    assert_eq!(h.betti, [1, 0, 0, 1]);
    // Chordal volume approaches 2π²ε from below.
    let vol = b.metric.total_volume();
    assert!(vol < 2.0 * PI * PI * eps && vol > 0.9 * 2.0 * PI * PI * eps, "{vol}");
    let fibre = b.fiber_loop();
    assert!(fibre.boundary(b.metric.complex()).unwrap().is_zero());
    let l = b.metric.chain_length(&fibre);
    assert!((l - 2.0 * PI * eps).abs() < 0.01 * 2.0 * PI * eps, "{l}");
    // The action field's dual integrates to the fibre length over ε².
    let alpha = b.vertical_form();
    assert!((fibre.pair_real(&alpha) - 2.0 * PI).abs() < 0.02 * 2.0 * PI);
}

#[test]
fn berger_fibre_filling_respects_bounds() {
    for eps in [1.0, 0.5] {
        let b = berger_mesh(&BergerModel::new(eps).unwrap(), 4).unwrap();
        let m = &b.metric;
        let h = homology_basis(m.complex()).unwrap();
        let fibre = b.fiber_loop();
        let f = min_filling_area(m.complex(), &m.measures().face_areas, &h, &fibre, &FillingOptions::default()).unwrap();
        let l = m.chain_length(&fibre);
        assert!(l / f.area <= 2.0 * eps * 1.1, "eps {eps}: {}", l / f.area);
        assert!(f.area >= PI * 0.95, "eps {eps}: {}", f.area);
    }
}

#[test]
fn berger_meshed_eigenvalue_round_case() {
    let b = berger_mesh(&BergerModel::new(1.0).unwrap(), 4).unwrap();
    let s = coexact_spectrum(&b.metric, 1, &SpectralOptions::default()).unwrap();
    assert!((s.eigenvalues[0] - 4.0).abs() < 0.15 * 4.0, "{:?}", s.eigenvalues);
}

#[test]
fn berger_cheeger_ratio_scales_with_epsilon() {
    let mut ratios = Vec::new();
    for eps in [1.0, 0.5, 0.25] {
        let b = berger_mesh(&BergerModel::new(eps).unwrap(), 2).unwrap();
        let m = &b.metric;
        let h = homology_basis(m.complex()).unwrap();
        let est = cheeger_estimate(m.complex(), m.measures(), &h, &[b.fiber_loop()], &CheegerOptions::default()).unwrap();
        ratios.push(est.h1_upper / eps);
    }
    assert!(ratios.iter().all(|r| *r > 0.2 && *r < 4.0), "{ratios:?}");
}

#[test]
fn cusp_interval_eigenvalue() {
    let e = cusp_eigenvalue(&CuspModel::new((-10f64).exp(), 2048).unwrap()).unwrap();
    assert!((e.analytic - 0.0246740).abs() < 1e-7);
    assert!((e.finite_difference - e.analytic).abs() < 1e-4);
    // Agreement is limited by the Sturm count's conditioning, about 1/(λh²) ulps.
    assert!((e.rayleigh - e.finite_difference).abs() < 1e-9 * e.finite_difference);
    // Exact discrete value (4/h²) sin²(πh/2L).
    let exact = 4.0 / (e.spacing * e.spacing) * (PI * e.spacing / 40.0).sin().powi(2);
    assert!((e.finite_difference - exact).abs() < 1e-9 * exact);
    assert!(CuspModel::new(0.1, 15).is_err());
}

#[test]
fn cusp_eigenvalue_collapses_monotonically() {
    let vals: Vec<f64> = [-10f64, -5.0, -2.0]
        .iter()
        .map(|l| cusp_eigenvalue(&CuspModel::new(l.exp(), 512).unwrap()).unwrap().finite_difference)
        .collect();
    assert!(vals[0] < vals[1] && vals[1] < vals[2], "{vals:?}");
}

#[test]
fn cusp_error_is_second_order() {
    let eps = (-3f64).exp();
    let e1 = cusp_eigenvalue(&CuspModel::new(eps, 63).unwrap()).unwrap().relative_error;
    let e2 = cusp_eigenvalue(&CuspModel::new(eps, 127).unwrap()).unwrap().relative_error;
    let order = (e1 / e2).log2();
    assert!((order - 2.0).abs() < 0.05, "{order}");
}

#[test]
fn cusp_mesh_volume_topology_and_equator() {
    let mut ratios = Vec::new();
    for eps in [(-1f64).exp(), (-2f64).exp()] {
        let model = CuspModel::new(eps, 64).unwrap();
        let c = cusp_mesh(&model, 2, 8).unwrap();
        let m = &c.metric;
        let h = homology_basis(m.complex()).unwrap();
        assert_eq!(h.betti, [1, 0, 0, 1]);
        let target = model.central_volume();
        assert!((c.central_volume() - target).abs() < 0.01 * target);
        let eq = c.equator();
        let f = min_filling_area(m.complex(), &m.measures().face_areas, &h, &eq, &FillingOptions::default()).unwrap();
        ratios.push(f.area / m.chain_length(&eq));
    }
    assert!(ratios.iter().all(|r| *r > 0.0 && *r < 1.0), "{ratios:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn invariant_eigenvalue_is_four_eps_squared(eps in 1e-3f64..=1.0) {
        let ev = berger_spectrum_invariant(&BergerModel::new(eps).unwrap()).unwrap();
        prop_assert!((ev[0] - 4.0 * eps * eps).abs() < 1e-12);
    }

    #[test]
    fn cusp_fd_is_below_analytic(l in 1.0f64..12.0, n in 16usize..200) {
        let e = cusp_eigenvalue(&CuspModel::new((-l).exp(), n).unwrap()).unwrap();
        prop_assert!(e.finite_difference <= e.analytic * (1.0 + 1e-12));
    }
}
