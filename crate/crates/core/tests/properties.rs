use fillbound::io::ChainJson;
use fillbound::pipeline::{bound_calculator, BoundParams};
use fillbound::{Chain, Simplex, WeightedComplex};
use proptest::prelude::*;

fn octahedron() -> WeightedComplex<f64> {
    let tris = [[0, 2, 4], [0, 2, 5], [0, 3, 4], [0, 3, 5], [1, 2, 4], [1, 2, 5], [1, 3, 4], [1, 3, 5]];
    WeightedComplex::from_simplices(
        tris.iter().enumerate().map(|(i, t)| (Simplex::new(t.to_vec()).unwrap(), Some(0.25 * (i + 1) as f64))),
        |_| Some(1.0),
    )
    .unwrap()
}

fn two_chain(coeffs: &[i64]) -> Chain {
    let c = octahedron();
    let mut x = Chain::zero(2);
    for (t, a) in c.simplices(2).iter().zip(coeffs) {
        x.add_term(t.clone(), *a);
    }
    x
}

proptest! {
    #[test]
    fn boundary_of_boundary_vanishes(coeffs in proptest::collection::vec(-5i64..=5, 8)) {
        let x = two_chain(&coeffs);
        prop_assert!(x.boundary().unwrap().boundary().unwrap().is_empty());
    }

    #[test]
    fn mass_is_subadditive(a in proptest::collection::vec(-4i64..=4, 8), b in proptest::collection::vec(-4i64..=4, 8)) {
        let c = octahedron();
        let (x, y) = (two_chain(&a), two_chain(&b));
        let mut s = x.clone();
        s += &y;
        prop_assert!(c.mass(&s) <= c.mass(&x) + c.mass(&y) + 1e-12);
        prop_assert_eq!(c.mass(&x.scale(-3)), 3.0 * c.mass(&x));
    }

    #[test]
    fn chain_json_round_trips(coeffs in proptest::collection::vec(-5i64..=5, 8)) {
        let z = two_chain(&coeffs).boundary().unwrap();
        let j = ChainJson::from(&z);
        let back: ChainJson = serde_json::from_str(&serde_json::to_string(&j).unwrap()).unwrap();
        prop_assert_eq!(back.to_chain().unwrap(), z);
    }

    #[test]
    fn bounds_grow_with_diameter(n in 1u64..=6, d in 0.1f64..100.0, k in 1u64..=4) {
        let p = BoundParams { n_tilde: n, d, b: 6.0, k_depth: k, n_width: 2, h1: 3, epsilon: 1e-3 };
        let q = BoundParams { d: 2.0 * d, ..p.clone() };
        let (a, b) = (bound_calculator(&p).unwrap(), bound_calculator(&q).unwrap());
        prop_assert!(b.f1_log2 > a.f1_log2 && b.f2_log2 > a.f2_log2 && b.area_log2 > a.area_log2);
    }
}
