mod common;

use std::f64::consts::PI;

use ballpoly::angles::{
    all_dihedrals, all_face_angles, dihedral_derivative, dihedral_from_distance, distance_from_dihedral,
    inner_dihedral,
};
use ballpoly::{build, CenterSet, Point3};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn strictly_decreasing_on_grid() {
    let grid: Vec<f64> = (0..1000).map(|k| 0.01 + 1.98 * k as f64 / 999.0).collect();
    let values: Vec<f64> = grid.iter().map(|&d| dihedral_from_distance(d).unwrap()).collect();
    assert!(values.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn anchors() {
    assert!((dihedral_from_distance(1.0).unwrap() - 2.0 * PI / 3.0).abs() < 1e-15);
    assert!((dihedral_from_distance(2f64.sqrt()).unwrap() - PI / 2.0).abs() < 1e-15);
    assert!(dihedral_from_distance(0.0).is_err());
    assert!(dihedral_from_distance(2.0).is_err());
    assert!(distance_from_dihedral(PI).is_err());
}

#[test]
fn geometric_oracle_agrees_on_random_edges() {
    let mut rng = common::rng(11);
    for _ in 0..200 {
        let a = common::in_ball(&mut rng, 3.0);
        let dir = common::in_ball(&mut rng, 1.0).normalize();
        let d = rng.random_range(0.01..1.99);
        let b = a + dir * d;
        let closed = dihedral_from_distance(d).unwrap();
        for phase in [0.0, 1.0, 2.5, 4.0] {
            assert!((common::dihedral_oracle(&a, &b, phase) - closed).abs() <= 1e-7);
        }
    }
}

#[test]
fn library_edges_match_oracle_on_random_fixtures() {
    let mut rng = common::rng(12);
    for _ in 0..20 {
        let n = rng.random_range(4..=10);
        let c = common::random_standard(&mut rng, n);
        let p = build(&c).unwrap();
        for (e, edge) in p.edges().iter().enumerate() {
            let (i, j) = edge.balls;
            let a = inner_dihedral(&p, e).unwrap();
            assert!((a.angle - common::dihedral_oracle(c.center(i), c.center(j), 0.3)).abs() <= 1e-7);
        }
    }
}

#[test]
fn derivative_matches_central_difference() {
    for k in 1..100 {
        let d = 0.02 * k as f64;
        let h = 1e-6;
        let fd = (dihedral_from_distance(d + h).unwrap() - dihedral_from_distance(d - h).unwrap()) / (2.0 * h);
        assert!((fd - dihedral_derivative(d)).abs() < 1e-6 * (1.0 + fd.abs()), "d = {d}");
    }
}

#[test]
fn tetra_face_angles_sum() {
    let p = build(&common::tetra()).unwrap();
    let angles = all_face_angles(&p).unwrap();
    assert_eq!(angles.len(), 12);
    // each face of the Reuleaux tetrahedron has three equal corners
    let first = angles[0].angle;
    assert!(angles.iter().all(|a| (a.angle - first).abs() < 1e-9));
    assert!(first > PI / 3.0 && first < PI);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_roundtrip(d in 0.001f64..1.999) {
        let back = distance_from_dihedral(dihedral_from_distance(d).unwrap()).unwrap();
        prop_assert!((back - d).abs() <= 1e-12);
    }

    #[test]
    fn dihedrals_invariant_under_rigid_motion(seed in 0u64..1000, reflect: bool) {
        let mut rng = common::rng(seed);
        let (m, t) = common::random_isometry(&mut rng, reflect);
        let c = common::tetra();
        let moved = CenterSet::from_points(c.centers().iter().map(|p| m * p + t).collect::<Vec<Point3>>()).unwrap();
        let a = all_dihedrals(&build(&c).unwrap()).unwrap();
        let b = all_dihedrals(&build(&moved).unwrap()).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x.balls, y.balls);
            prop_assert!((x.angle - y.angle).abs() < 1e-9);
        }
    }
}
