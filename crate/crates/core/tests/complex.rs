use coexact::complex::{build_surface, chain_complex_identity_holds, Chain, SimplicialComplex};
use coexact::models::berger::{berger_mesh, BergerModel};
use coexact::models::cusp::{cusp_mesh, CuspModel};
use coexact::models::fixtures::{four_simplex_boundary, octahedron, rp2, seven_vertex_torus};
use coexact::models::{generate_mesh, ModelSpec};
use proptest::prelude::*;

#[test]
fn boundary_of_boundary_vanishes_on_generated_meshes() {
    let mut complexes: Vec<SimplicialComplex> = vec![four_simplex_boundary(), octahedron().0, rp2(), seven_vertex_torus().0];
    for spec in [
        ModelSpec::Torus { n: 3 },
        ModelSpec::Berger { epsilon: 0.5, n: 2 },
        ModelSpec::Cusp {
            epsilon: 0.2,
            sphere_level: 1,
            layers: 4,
        },
    ] {
        complexes.push(generate_mesh(&spec).unwrap().complex().clone());
    }
    for cx in &complexes {
        assert!(chain_complex_identity_holds(cx));
    }
}

#[test]
fn torus_grid_counts() {
    let m = generate_mesh(&ModelSpec::Torus { n: 3 }).unwrap();
    let cx = m.complex();
    assert_eq!(cx.count(3), 6 * 27);
    assert_eq!(cx.euler_characteristic(), 0);
    assert!(cx.is_closed_3manifold());
}

#[test]
fn generated_spheres_have_euler_characteristic_zero() {
    let b = berger_mesh(&BergerModel::new(1.0).unwrap(), 2).unwrap();
    assert_eq!(b.metric.complex().count(3), 48 * 8);
    assert_eq!(b.metric.complex().euler_characteristic(), 0);
    let c = cusp_mesh(&CuspModel::new(0.3, 16).unwrap(), 1, 4).unwrap();
    assert_eq!(c.metric.complex().euler_characteristic(), 0);
}

#[test]
fn serialization_round_trips() {
    let m = generate_mesh(&ModelSpec::Torus { n: 3 }).unwrap();
    let data = m.complex().to_data();
    let text = serde_json::to_string(&data).unwrap();
    let back = SimplicialComplex::from_data(&serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(back.to_data(), data);
    assert_eq!(serde_json::to_string(&back.to_data()).unwrap(), text);
}

fn random_surface() -> impl Strategy<Value = SimplicialComplex> {
    prop::collection::btree_set((0usize..7, 0usize..7, 0usize..7), 1..20).prop_filter_map("simplices", |set| {
        let tris: Vec<[usize; 3]> = set
            .into_iter()
            .filter(|(a, b, c)| a < b && b < c)
            .map(|(a, b, c)| [a, b, c])
            .collect();
        build_surface(7, &tris).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn boundary_squared_is_zero(cx in random_surface(), coeffs in prop::collection::vec(-3i64..=3, 40)) {
        prop_assert!(chain_complex_identity_holds(&cx));
        let c = Chain::from_pairs(2, (0..cx.count(2)).map(|f| (f, coeffs[f % coeffs.len()])));
        let bd = c.boundary(&cx).unwrap();
        prop_assert!(bd.boundary(&cx).unwrap().is_zero());
    }
}
