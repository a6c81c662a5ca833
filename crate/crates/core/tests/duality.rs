mod common;

use ballpoly::ball::{double_dual_isomorphism, dual, FaceLattice};
use ballpoly::{build, BallPolyhedron, CenterSet, Error, Point3};
use rand::Rng;

fn check(p: &BallPolyhedron) {
    let d = dual(p).unwrap();
    assert!(d.polyhedron.is_standard());
    let violation = common::anti_isomorphism_violation(&FaceLattice::of(p), &FaceLattice::of(&d.polyhedron), &d.maps);
    assert_eq!(violation, None);
    // the vertices of P* are the centers of P
    for (f, &k) in d.maps.face.iter().enumerate() {
        let x = d.polyhedron.vertices()[k].position;
        assert!((x - p.centers().center(f)).norm() < 1e-9);
    }
    let (pp, maps) = double_dual_isomorphism(p).unwrap();
    let (a, b) = (FaceLattice::of(p), FaceLattice::of(&pp));
    assert_eq!(a.f_vector(), b.f_vector());
    // isomorphism: the same incidences after relabeling
    for (v, faces) in a.vertex_faces.iter().enumerate() {
        let mut image: Vec<usize> = faces.iter().map(|&f| maps.face[f]).collect();
        image.sort();
        assert_eq!(image, b.vertex_faces[maps.vertex[v]]);
    }
    for (e, &(x, y)) in a.edge_faces.iter().enumerate() {
        let (u, w) = b.edge_faces[maps.edge[e]];
        let mut image = [maps.face[x], maps.face[y]];
        image.sort();
        assert_eq!(image, [u.min(w), u.max(w)]);
    }
}

#[test]
fn tetrahedron_dual() {
    check(&build(&common::tetra()).unwrap());
}

#[test]
fn random_standard_duals() {
    let mut rng = common::rng(51);
    for _ in 0..20 {
        let n = rng.random_range(4..=10);
        check(&build(&common::random_standard(&mut rng, n)).unwrap());
    }
}

#[test]
fn non_standard_input_is_refused() {
    let c = CenterSet::from_points(vec![Point3::zeros(), Point3::x() * 0.5]).unwrap();
    assert!(matches!(dual(&build(&c).unwrap()), Err(Error::Precondition(_))));
}
