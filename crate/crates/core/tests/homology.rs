use coexact::complex::Chain;
use coexact::homology::{classify_cycle, homology_basis, smith_normal_form, IntMatrix, TrivialOrder};
use coexact::models::fixtures::{four_simplex_boundary, octahedron, octahedron_equator, rp2, seven_vertex_torus};
use coexact::models::torus::{flat_torus, vertex_index};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn check_snf(a: &IntMatrix) {
    let snf = smith_normal_form(a);
    assert_eq!(snf.u.mul(a).mul(&snf.v), snf.s);
    assert!(snf.s.is_diagonal());
    assert!(snf.u.determinant().abs().is_one());
    assert!(snf.v.determinant().abs().is_one());
    let f = snf.invariant_factors();
    for w in f.windows(2) {
        assert!((&w[1] % &w[0]).is_zero(), "{} does not divide {}", w[0], w[1]);
    }
}

#[test]
fn snf_small_examples() {
    let id = IntMatrix::identity(3);
    assert_eq!(smith_normal_form(&id).s, id);
    let a = IntMatrix::from_rows(&[vec![2i64, 4], vec![6, 8]]);
    check_snf(&a);
    let f = smith_normal_form(&a).invariant_factors();
    assert_eq!(f, vec![BigInt::from(2), BigInt::from(4)]);
}

#[test]
fn rp2_boundary_has_one_factor_two() {
    let cx = rp2();
    let d2 = cx.boundary_matrix(2).unwrap();
    let mut rows = vec![vec![0i64; d2.ncols()]; d2.nrows()];
    for (i, j, v) in d2.iter() {
        rows[i][j] = v;
    }
    let a = IntMatrix::from_rows(&rows);
    check_snf(&a);
    let f = smith_normal_form(&a).invariant_factors();
    let non_unit: Vec<_> = f.iter().filter(|x| !x.is_one()).collect();
    assert_eq!(non_unit, vec![&BigInt::from(2)]);
}

#[test]
fn sphere_has_no_first_homology() {
    let h = homology_basis(&four_simplex_boundary()).unwrap();
    assert_eq!(h.betti, [1, 0, 0, 1]);
    assert_eq!(h.rank, 0);
    assert!(h.torsion_orders.is_empty());
    assert_eq!(h.r_universal, 1);
}

#[test]
fn torus_grid_basis_and_duality() {
    let n = 3;
    let m = flat_torus(n).unwrap();
    let cx = m.complex();
    let h = homology_basis(cx).unwrap();
    assert_eq!(h.betti, [1, 3, 3, 1]);
    assert_eq!(h.rank, 3);
    let p = h.pairing_matrix();
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(p[i][j], i64::from(i == j));
        }
    }
    for (z, beta) in h.cycles.iter().zip(&h.dual_cocycles) {
        assert!(z.boundary(cx).unwrap().is_zero());
        // Closed: pairs to zero with every triangle boundary.
        for f in 0..cx.count(2) {
            let tri = Chain::from_pairs(2, [(f, 1)]).boundary(cx).unwrap();
            assert_eq!(tri.pair(beta), 0);
        }
    }
    // The axis loops form a basis: their coordinates are unimodular.
    let axis = |k: usize| {
        let walk: Vec<usize> = (0..=n)
            .map(|i| {
                let mut c = [0; 3];
                c[k] = i % n;
                vertex_index(n, c[0], c[1], c[2])
            })
            .collect();
        Chain::edge_path(cx, &walk).unwrap()
    };
    let mut rows = Vec::new();
    for k in 0..3 {
        let class = classify_cycle(cx, &h, &axis(k)).unwrap();
        assert_eq!(class.trivial_order, TrivialOrder::Infinite);
        let rebuilt = h.unrolled(&axis(k));
        assert_eq!(classify_cycle(cx, &h, &rebuilt).unwrap().trivial_order, TrivialOrder::Finite(1));
        rows.push(class.free_coords);
    }
    assert!(IntMatrix::from_rows(&rows).determinant().abs().is_one());
}

#[test]
fn rp2_torsion_and_core_loop() {
    let cx = rp2();
    let h = homology_basis(&cx).unwrap();
    assert_eq!(h.rank, 0);
    assert_eq!(h.torsion_orders, vec![2]);
    assert_eq!(h.r_universal, 2);
    let class = classify_cycle(&cx, &h, &h.torsion_cycles[0]).unwrap();
    assert!(class.free_coords.is_empty());
    assert_eq!(class.trivial_order, TrivialOrder::Finite(2));
}

#[test]
fn octahedron_equator_bounds() {
    let (cx, _) = octahedron();
    let h = homology_basis(&cx).unwrap();
    let class = classify_cycle(&cx, &h, &octahedron_equator(&cx)).unwrap();
    assert!(class.free_coords.is_empty());
    assert_eq!(class.trivial_order, TrivialOrder::Finite(1));
}

#[test]
fn seven_vertex_torus_betti() {
    let (cx, _) = seven_vertex_torus();
    let h = homology_basis(&cx).unwrap();
    assert_eq!(h.betti, [1, 2, 1, 0]);
    assert!(h.torsion_orders.is_empty());
}

#[test]
fn non_cycle_is_rejected() {
    let (cx, _) = octahedron();
    let h = homology_basis(&cx).unwrap();
    let open = Chain::edge_path(&cx, &[0, 2, 1]).unwrap();
    assert!(classify_cycle(&cx, &h, &open).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn snf_invariants_on_random_matrices(rows in 1usize..5, cols in 1usize..5, entries in prop::collection::vec(-6i64..=6, 16)) {
        let data: Vec<Vec<i64>> = (0..rows).map(|i| (0..cols).map(|j| entries[(i * cols + j) % 16]).collect()).collect();
        check_snf(&IntMatrix::from_rows(&data));
    }
}
