use super::*;
use crate::chain::Simplex;

fn s(v: &[usize]) -> Simplex {
    Simplex::new(v.to_vec()).unwrap()
}

fn complex(tris: &[[usize; 3]], edges: &[[usize; 2]]) -> WeightedComplex<f64> {
    let entries = tris
        .iter()
        .map(|t| (s(t), Some(1.0)))
        .chain(edges.iter().map(|e| (s(e), Some(1.0))));
    WeightedComplex::from_simplices(entries, |_| Some(1.0)).unwrap()
}

fn tetra() -> WeightedComplex<f64> {
    complex(&[[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]], &[])
}

fn circle() -> WeightedComplex<f64> {
    complex(&[], &[[0, 1], [1, 2], [0, 2]])
}

#[test]
fn homology_examples() {
    assert_eq!(homology_rank_and_torsion(&circle(), 1).unwrap(), (1, vec![]));
    assert_eq!(homology_rank_and_torsion(&tetra(), 1).unwrap(), (0, vec![]));
    assert_eq!(homology_rank_and_torsion(&tetra(), 2).unwrap(), (1, vec![]));
    assert_eq!(homology_rank_and_torsion(&tetra(), 0).unwrap(), (1, vec![]));
    assert!(matches!(
        homology_rank_and_torsion(&tetra(), 3),
        Err(Error::DegreeOutOfRange { k: 3, dim: 2 })
    ));
}

#[test]
fn fills_exist_examples() {
    let z = Chain::from_simplex(s(&[0, 1, 2]), 1).boundary().unwrap();
    assert!(fills_exist(&z, &tetra()).unwrap());
    let loop3 = Chain::from_walk(&[0, 1, 2, 0]).unwrap();
    assert!(!fills_exist(&loop3, &circle()).unwrap());
    let open = Chain::from_walk(&[0, 1]).unwrap();
    assert_eq!(fills_exist(&open, &tetra()), Err(Error::NotACycle));
}

#[test]
fn some_filling_is_exact() {
    let c = tetra();
    let z = Chain::from_simplex(s(&[0, 1, 2]), 3).boundary().unwrap();
    let r = some_filling(&z, &c).unwrap();
    assert_eq!(r.filling.unwrap().boundary().unwrap(), z);
    assert!(!r.optimal);
    let e = some_filling(&Chain::zero(1), &c).unwrap();
    assert!(e.filling.unwrap().is_empty());
    let loop3 = Chain::from_walk(&[0, 1, 2, 0]).unwrap();
    assert_eq!(some_filling(&loop3, &circle()), Err(Error::DoesNotBound));
}

#[test]
fn minimal_mass_examples() {
    let c = tetra();
    let sigma = s(&[0, 1, 2]);
    let z = Chain::from_simplex(sigma.clone(), 1).boundary().unwrap();
    let r = minimal_mass_filling(&z, &c).unwrap();
    assert_eq!(r.mass, 1.0);
    assert!(r.optimal);
    assert_eq!(r.filling.unwrap(), Chain::from_simplex(sigma.clone(), 1));
    assert_eq!(minimal_mass_filling(&Chain::zero(1), &c).unwrap().mass, 0.0);
}

#[test]
fn heavy_face_loses_to_complement() {
    let mut c = tetra();
    let sigma = s(&[0, 1, 2]);
    c.set_volume(&sigma, 10.0).unwrap();
    let z = Chain::from_simplex(sigma.clone(), 1).boundary().unwrap();
    let r = minimal_mass_filling(&z, &c).unwrap();
    assert_eq!(r.mass, 3.0);
    assert_eq!(r.filling.as_ref().unwrap().boundary().unwrap(), z);
    assert_eq!(r.filling.unwrap().coeff(&sigma), 0);
    let b = brute_force_filling(&z, &c, 2).unwrap().unwrap();
    assert_eq!(b.mass, 3.0);
}

#[test]
fn bounded_filling_examples() {
    let c = tetra();
    let sigma = s(&[0, 1, 2]);
    let z = Chain::from_simplex(sigma.clone(), 1).boundary().unwrap();
    let r = bounded_filling(&z, &c, 1).unwrap().unwrap();
    assert_eq!(r.filling.unwrap(), Chain::from_simplex(sigma.clone(), 1));

    // a single triangle: ∂(2σ) only has the filling 2σ
    let tri = complex(&[[0, 1, 2]], &[]);
    let z2 = Chain::from_simplex(sigma, 2).boundary().unwrap();
    assert!(bounded_filling(&z2, &tri, 1).unwrap().is_none());
    assert!(brute_force_filling(&z2, &tri, 1).unwrap().is_none());
    assert_eq!(bounded_filling(&z2, &tri, 2).unwrap().unwrap().max_abs_coeff, 2);
}

#[test]
fn brute_force_edge_cases() {
    let c = tetra();
    let z = Chain::from_simplex(s(&[0, 1, 2]), 1).boundary().unwrap();
    assert!(brute_force_filling(&z, &c, 0).unwrap().is_none());
    let e = brute_force_filling(&Chain::zero(1), &c, 0).unwrap().unwrap();
    assert_eq!(e.mass, 0.0);
    let loop3 = Chain::from_walk(&[0, 1, 2, 0]).unwrap();
    assert!(brute_force_filling(&loop3, &circle(), 3).unwrap().is_none());
}

#[test]
fn brute_force_rejects_large_instances() {
    // 18 triangles: a fan around vertex 0
    let tris: Vec<[usize; 3]> = (1..=18).map(|i| [0, i, i + 1]).collect();
    let c = complex(&tris, &[]);
    let z = Chain::from_simplex(s(&[0, 1, 2]), 1).boundary().unwrap();
    assert!(matches!(brute_force_filling(&z, &c, 1), Err(Error::TooLarge(_))));
}

#[test]
fn search_matches_brute_force_on_octahedron() {
    // octahedron boundary: 8 faces, H₂ = ℤ
    let tris = [
        [0, 2, 4], [0, 2, 5], [0, 3, 4], [0, 3, 5],
        [1, 2, 4], [1, 2, 5], [1, 3, 4], [1, 3, 5],
    ];
    let mut c = complex(&tris, &[]);
    let heavy = [(0usize, 0.5), (3, 2.0), (5, 0.25)];
    for (i, v) in heavy {
        let t = c.simplices(2)[i].clone();
        c.set_volume_unchecked(&t, v);
    }
    let solver = FillingSolver::new(&c).unwrap();
    for walk in [&[0usize, 2, 4, 0][..], &[2, 4, 3, 5, 2], &[0, 2, 1, 3, 0], &[0, 2, 1, 5, 0]] {
        let z = Chain::from_walk(walk).unwrap();
        let r = solver.minimal_mass_filling(&z, &SearchConfig::default()).unwrap();
        let b = brute_force_filling(&z, &c, 3).unwrap().unwrap();
        assert_eq!(r.mass, b.mass, "{walk:?}");
        assert_eq!(r.filling.unwrap().boundary().unwrap(), z);
    }
}

#[test]
fn hf1_requires_trivial_h1() {
    let cfg = SearchConfig::default();
    assert_eq!(hf1_estimate(&circle(), 5.0, 10, 1, &cfg), Err(Error::NontrivialH1));
    assert!(hf1_estimate(&tetra(), 2.0, 10, 1, &cfg).unwrap().is_empty());
    let a = hf1_estimate(&tetra(), 3.0, 20, 7, &cfg).unwrap();
    let b = hf1_estimate(&tetra(), 3.0, 20, 7, &cfg).unwrap();
    assert_eq!(a, b);
    assert!(!a.is_empty());
    assert!(a.iter().all(|x| x.fill_mass == 1.0));
}
