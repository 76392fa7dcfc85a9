use coexact::complex::Chain;
use coexact::dec::Measures;
use coexact::filling::{min_filling_area, FillingOptions};
use coexact::flow::montecarlo::sample_trajectories;
use coexact::flow::{build_vector_field, TrajectoryOptions};
use coexact::homology::{classify_cycle, fundamental_cycles, homology_basis};
use coexact::models::fixtures::{octahedron, seven_vertex_torus};
use coexact::models::torus::{flat_torus, torus_eigenform};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// The LP relaxation never exceeds the integer optimum, and on these
    /// torsion-free surfaces the two agree.
    #[test]
    fn lp_matches_integer_optimum(weights in prop::collection::vec(0.5f64..2.0, 14)) {
        let (cx, _) = seven_vertex_torus();
        let h = homology_basis(&cx).unwrap();
        let areas: Vec<f64> = (0..cx.count(2)).map(|f| weights[f % weights.len()]).collect();
        for (_, z) in fundamental_cycles(&cx) {
            let class = classify_cycle(&cx, &h, &z).unwrap();
            if class.trivial_order.finite().is_none() {
                continue;
            }
            let f = min_filling_area(&cx, &areas, &h, &z, &FillingOptions::default()).unwrap();
            let gap = f.integrality_gap.unwrap();
            prop_assert!(gap >= -1e-9);
            prop_assert!(gap.abs() < 1e-9);
        }
    }

    #[test]
    fn filling_area_is_subadditive(weights in prop::collection::vec(0.5f64..2.0, 8), a in 0usize..4, b in 0usize..4) {
        let (cx, _) = octahedron();
        let h = homology_basis(&cx).unwrap();
        let m = Measures { edge_lengths: vec![1.0; cx.count(1)], face_areas: weights };
        let loops: [&[usize]; 4] = [&[0, 2, 4, 0], &[0, 4, 3, 0], &[1, 2, 5, 1], &[0, 2, 1, 3, 0]];
        let g1 = Chain::edge_path(&cx, loops[a]).unwrap();
        let g2 = Chain::edge_path(&cx, loops[b]).unwrap();
        let mut g = g1.clone();
        g.add_chain(&g2, 1);
        let opts = FillingOptions::default();
        let area = |c: &Chain| min_filling_area(&cx, &m.face_areas, &h, c, &opts).unwrap().area;
        prop_assert!(area(&g) <= area(&g1) + area(&g2) + 1e-9);
    }

    #[test]
    fn trajectories_are_deterministic(seed in 0u64..1_000_000) {
        let n = 3;
        let m = flat_torus(n).unwrap();
        let field = build_vector_field(&m, &torus_eigenform(&m, n, 1.0).unwrap()).unwrap();
        let opts = TrajectoryOptions::default();
        let a = sample_trajectories(&m, &field, 8, 0.5, seed, &opts).unwrap();
        let b = sample_trajectories(&m, &field, 8, 0.5, seed, &opts).unwrap();
        prop_assert_eq!(a, b);
    }
}
