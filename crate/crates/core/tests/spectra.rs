use std::f64::consts::PI;

use coexact::models::torus::flat_torus;
use coexact::spectra::{coexact_spectrum, function_spectrum, SpectralOptions};

fn torus_first(n: usize) -> f64 {
    let m = flat_torus(n).unwrap();
    let s = coexact_spectrum(&m, 3, &SpectralOptions::default()).unwrap();
    assert!(s.residuals.iter().all(|r| *r < 1e-6), "{:?}", s.residuals);
    assert_eq!(s.kernel_dimension, m.complex().count(0) - 1 + 3);
    s.eigenvalues[0]
}

#[test]
fn flat_torus_converges_to_four_pi_squared() {
    let target = 4.0 * PI * PI;
    let e4 = (torus_first(4) - target).abs() / target;
    let e8 = (torus_first(8) - target).abs() / target;
    assert!(e8 < 0.05, "{e8}");
    assert!(e8 < e4, "{e4} -> {e8}");
}

#[test]
fn function_spectrum_of_torus() {
    let m = flat_torus(6).unwrap();
    let s = function_spectrum(&m, 2, &SpectralOptions::default()).unwrap();
    let target = 4.0 * PI * PI;
    assert!((s.eigenvalues[0] - target).abs() / target < 0.25, "{:?}", s.eigenvalues);
}

#[test]
fn spectrum_is_reproducible() {
    let m = flat_torus(4).unwrap();
    let a = coexact_spectrum(&m, 4, &SpectralOptions::default()).unwrap();
    let b = coexact_spectrum(&m, 4, &SpectralOptions::default()).unwrap();
    assert_eq!(a.eigenvalues, b.eigenvalues);
}

#[test]
fn non_manifold_input_is_refused() {
    let cx = coexact::models::fixtures::rp2();
    let pos: Vec<[f64; 3]> = (0..cx.vertex_count()).map(|v| [v as f64, (v * v) as f64, 1.0]).collect();
    // A surface has no metric 3-cells, so assembly or the solver refuses it.
    let r = coexact::dec::assemble_metric(cx, coexact::dec::Geometry::Embedding(pos));
    if let Ok(m) = r {
        assert!(coexact_spectrum(&m, 1, &SpectralOptions::default()).is_err());
    }
}
