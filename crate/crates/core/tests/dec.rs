use coexact::dec::{assemble_metric, harmonic_defect, hodge_decompose, norms, sup_l2_ratio, Geometry};
use coexact::models::fixtures::single_tetrahedron;
use coexact::models::torus::{constant_form, flat_torus, torus_eigenform};
use proptest::prelude::*;

#[test]
fn d_squared_vanishes_as_real_matrices() {
    let m = flat_torus(3).unwrap();
    for k in 0..2 {
        let x: Vec<f64> = (0..m.complex().count(k)).map(|i| (i as f64 * 0.37).sin()).collect();
        let dd = m.d(k + 1).mul_vec(&m.d(k).mul_vec(&x));
        assert!(dd.iter().all(|v| v.abs() < 1e-12));
    }
}

#[test]
fn single_tetrahedron_volume_and_measures() {
    let (cx, pos) = single_tetrahedron();
    let m = assemble_metric(cx, Geometry::Embedding(pos)).unwrap();
    assert!((m.total_volume() - 1.0 / 6.0).abs() < 1e-15);
    let lengths = &m.measures().edge_lengths;
    let mut sorted = lengths.clone();
    sorted.sort_by(f64::total_cmp);
    assert!((sorted[0] - 1.0).abs() < 1e-15 && (sorted[5] - 2f64.sqrt()).abs() < 1e-15);
}

#[test]
fn worked_example_norms() {
    // α = cos(2πx) dy: ‖dα‖₁ = 4, ‖α‖₂² = 1/2, ‖α‖_∞ = 1.
    let n = 8;
    let m = flat_torus(n).unwrap();
    let alpha = torus_eigenform(&m, n, 1.0).unwrap();
    let na = norms(&m, 1, &alpha).unwrap();
    let nd = norms(&m, 2, &m.d(1).mul_vec(&alpha)).unwrap();
    assert!((nd.l1 - 4.0).abs() < 0.05 * 4.0, "{}", nd.l1);
    assert!((na.l2 * na.l2 - 0.5).abs() < 0.02, "{}", na.l2);
    assert!((na.linf - 1.0).abs() < 0.1, "{}", na.linf);
    let ratio = sup_l2_ratio(&m, &alpha).unwrap();
    assert!((ratio - 2f64.sqrt()).abs() < 0.15, "{ratio}");
    // Chain of constants: ‖dα‖₁ ‖α‖_∞ / ‖α‖₂² ≈ 8.
    let chain = nd.l1 * na.linf / (na.l2 * na.l2);
    assert!((chain - 8.0).abs() < 0.8, "{chain}");
}

#[test]
fn constant_forms_are_harmonic() {
    let n = 3;
    let m = flat_torus(n).unwrap();
    let dx = constant_form(&m, n, [1.0, 0.0, 0.0]);
    let (up, down) = harmonic_defect(&m, 1, &dx);
    assert!(up < 1e-12 && down < 1e-12);
    let hd = hodge_decompose(&m, 1, &dx, 1e-12).unwrap();
    let h2: f64 = hd.harmonic.iter().zip(&dx).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(h2 < 1e-9);
}

#[test]
fn eigenform_is_coexact() {
    let n = 4;
    let m = flat_torus(n).unwrap();
    let alpha = torus_eigenform(&m, n, 1.0).unwrap();
    let hd = hodge_decompose(&m, 1, &alpha, 1e-12).unwrap();
    let scale = alpha.iter().map(|x| x.abs()).fold(0.0, f64::max);
    assert!(hd.exact.iter().chain(&hd.harmonic).all(|x| x.abs() < 1e-8 * scale));
}

#[test]
fn norms_reject_bad_length() {
    let m = flat_torus(3).unwrap();
    assert!(norms(&m, 1, &[1.0, 2.0]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn hodge_parts_are_orthogonal_and_sum_back(seed in 0u64..1000) {
        let m = flat_torus(3).unwrap();
        let omega: Vec<f64> = (0..m.complex().count(1))
            .map(|i| ((i as u64 * 2654435761 + seed * 40503) % 1000) as f64 / 500.0 - 1.0)
            .collect();
        let hd = hodge_decompose(&m, 1, &omega, 1e-12).unwrap();
        prop_assert!(hd.orthogonality_defect(&m, 1) < 1e-8);
        for i in 0..omega.len() {
            prop_assert!((hd.exact[i] + hd.coexact[i] + hd.harmonic[i] - omega[i]).abs() < 1e-12);
        }
        let (up, down) = harmonic_defect(&m, 1, &hd.harmonic);
        prop_assert!(up < 1e-7 && down < 1e-7);
    }
}
