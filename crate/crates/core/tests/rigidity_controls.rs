mod common;

use ballpoly::rigidity::{
    flex_length_derivative, flex_length_derivative_fd, hull_framework, is_infinitesimally_rigid, nontrivial_residual,
    rigidity_matrix, trivial_basis, Framework,
};
use ballpoly::{Error, Point3, Tolerance};
use nalgebra::DVector;
use proptest::prelude::*;

fn cube() -> Vec<Point3> {
    (0..8)
        .map(|k| Point3::new((k & 1) as f64, ((k >> 1) & 1) as f64, ((k >> 2) & 1) as f64))
        .collect()
}

fn cube_graph() -> Framework {
    let mut edges = Vec::new();
    for a in 0..8usize {
        for b in a + 1..8 {
            if (a ^ b).count_ones() == 1 {
                edges.push((a, b));
            }
        }
    }
    Framework::new(cube(), edges).unwrap()
}

#[test]
fn k4_is_rigid() {
    let pts = common::tetra_points(1.0);
    let edges = vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let r = is_infinitesimally_rigid(&Framework::new(pts, edges).unwrap(), &Tolerance::default()).unwrap();
    assert!(r.rigid);
    assert_eq!(r.nullity, 6);
    assert!(r.nontrivial_flexes.is_empty());
}

#[test]
fn cube_graph_flexes() {
    let f = cube_graph();
    let r = is_infinitesimally_rigid(&f, &Tolerance::default()).unwrap();
    assert!(!r.rigid);
    // 24 coordinates against 12 independent bars
    assert_eq!(r.nullity, 12);
    // the flexes modulo rigid motions span six dimensions
    let span = nalgebra::DMatrix::from_columns(&r.nontrivial_flexes);
    assert_eq!(span.rank(1e-8), 6);
    let m = rigidity_matrix(&f, &Tolerance::default()).matrix;
    for k in &r.kernel {
        assert!((&m * k).amax() <= 1e-8);
        assert!(flex_length_derivative(&f, k) <= 1e-8);
        assert!(flex_length_derivative_fd(&f, k, 1e-6) <= 1e-5);
    }
    for k in &r.nontrivial_flexes {
        assert!(nontrivial_residual(f.positions(), k) > 1e-6);
    }
}

#[test]
fn convex_triangulations_are_rigid() {
    let tol = Tolerance::default();
    let tri_cube = hull_framework(&cube(), true).unwrap();
    assert_eq!(tri_cube.edges().len(), 18);
    assert_eq!(is_infinitesimally_rigid(&tri_cube, &tol).unwrap().nullity, 6);
    let octa: Vec<Point3> = [
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ]
    .iter()
    .map(|p| Point3::new(p[0], p[1], p[2]))
    .collect();
    let f = hull_framework(&octa, false).unwrap();
    assert_eq!(f.edges().len(), 12);
    assert!(is_infinitesimally_rigid(&f, &tol).unwrap().rigid);
}

#[test]
fn rigid_motions_do_not_stretch_bars() {
    let f = cube_graph();
    let translation = DVector::from_fn(24, |r, _| [0.3, -1.0, 2.0][r % 3]);
    assert_eq!(flex_length_derivative(&f, &translation), 0.0);
    let w = Point3::new(0.2, -0.7, 0.4);
    let rotation = DVector::from_iterator(24, f.positions().iter().flat_map(|p| {
        let q = w.cross(p);
        [q.x, q.y, q.z]
    }));
    assert!(flex_length_derivative(&f, &rotation) <= 1e-12);
}

#[test]
fn planar_frameworks_are_refused() {
    let square = vec![Point3::zeros(), Point3::x(), Point3::new(1.0, 1.0, 0.0), Point3::y()];
    let f = Framework::new(square, vec![(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
    assert!(matches!(is_infinitesimally_rigid(&f, &Tolerance::default()), Err(Error::DegenerateSpan(2))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn trivial_motions_lie_in_the_kernel(seed in 0u64..100_000, m in 4usize..12) {
        let mut rng = common::rng(seed);
        let pts: Vec<Point3> = (0..m).map(|_| common::in_ball(&mut rng, 2.0)).collect();
        let mut edges = Vec::new();
        for a in 0..m {
            for b in a + 1..m {
                if !(a + 2 * b + seed as usize).is_multiple_of(3) {
                    edges.push((a, b));
                }
            }
        }
        let f = Framework::new(pts.clone(), edges).unwrap();
        let data = rigidity_matrix(&f, &Tolerance::default());
        let basis = trivial_basis(&pts);
        prop_assert_eq!(basis.len(), 6);
        for b in &basis {
            prop_assert!((&data.matrix * b).amax() <= 1e-10);
            prop_assert!(nontrivial_residual(&pts, b) <= 1e-10);
        }
        prop_assert!(data.rank <= 3 * m - 6);
        prop_assert!(data.nullity >= 6);
    }
}
