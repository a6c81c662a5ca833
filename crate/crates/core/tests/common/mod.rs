//! Fixtures and brute-force oracles shared by the integration tests. Nothing
//! here calls into the library's geometry beyond constructing center sets.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use ballpoly::ball::{build, reduce, FaceLattice, LatticeMaps};
use ballpoly::{CenterSet, Point3, Vec3};
use nalgebra::{DMatrix, Matrix3, Quaternion, UnitQuaternion, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn tetra_points(edge: f64) -> Vec<Point3> {
    let h = (2.0f64 / 3.0).sqrt();
    vec![
        Point3::new(0.0, 0.0, 0.0),
        Point3::new(1.0, 0.0, 0.0),
        Point3::new(0.5, 3f64.sqrt() / 2.0, 0.0),
        Point3::new(0.5, 3f64.sqrt() / 6.0, h),
    ]
    .into_iter()
    .map(|p| p * edge)
    .collect()
}

pub fn tetra() -> CenterSet {
    CenterSet::from_points(tetra_points(1.0)).unwrap()
}

/// Octahedron of half-diagonal 0.4 with small fixed offsets that break its
/// co-sphericity.
pub fn perturbed_octahedron() -> CenterSet {
    let a = 0.4;
    let offsets = [
        [0.011, -0.004, 0.007],
        [-0.006, 0.009, -0.003],
        [0.002, 0.013, 0.005],
        [-0.008, -0.005, 0.010],
        [0.004, -0.007, 0.012],
        [-0.010, 0.003, -0.006],
    ];
    let base = [
        [a, 0.0, 0.0],
        [-a, 0.0, 0.0],
        [0.0, a, 0.0],
        [0.0, -a, 0.0],
        [0.0, 0.0, a],
        [0.0, 0.0, -a],
    ];
    let pts = base
        .iter()
        .zip(offsets)
        .map(|(b, o)| Point3::new(b[0] + o[0], b[1] + o[1], b[2] + o[2]))
        .collect();
    CenterSet::from_points(pts).unwrap()
}

pub fn in_ball(rng: &mut impl Rng, radius: f64) -> Point3 {
    loop {
        let p = Point3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        if p.norm_squared() <= 1.0 {
            return p * radius;
        }
    }
}

/// `n` centers i.i.d. uniform in a ball of radius 0.3, reduced, redrawn until
/// the ball-polyhedron is simple and standard with at least four faces.
pub fn random_standard(rng: &mut impl Rng, n: usize) -> CenterSet {
    loop {
        let pts: Vec<Point3> = (0..n).map(|_| in_ball(rng, 0.3)).collect();
        let Ok(c) = CenterSet::from_points(pts) else { continue };
        let Ok(r) = reduce(&c) else { continue };
        if r.len() < 4 {
            continue;
        }
        if let Ok(p) = build(&r) {
            if p.is_simple() && p.is_standard() {
                return r;
            }
        }
    }
}

/// Random orthogonal map (a reflection when `reflect`) and translation.
pub fn random_isometry(rng: &mut impl Rng, reflect: bool) -> (Matrix3<f64>, Vec3) {
    let q: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(rng));
    let rot = UnitQuaternion::from_quaternion(Quaternion::new(q[0], q[1], q[2], q[3]));
    let mut m = *rot.to_rotation_matrix().matrix();
    if reflect {
        m *= Matrix3::from_diagonal(&Vec3::new(-1.0, 1.0, 1.0));
    }
    let t = Vec3::new(
        rng.random_range(-5.0..5.0),
        rng.random_range(-5.0..5.0),
        rng.random_range(-5.0..5.0),
    );
    (m, t)
}

/// Inner dihedral angle measured directly: both outward sphere normals at a
/// point of the intersection circle of the unit spheres around `a` and `b`.
pub fn dihedral_oracle(a: &Point3, b: &Point3, phase: f64) -> f64 {
    let axis = b - a;
    let d = axis.norm();
    let u = axis / d;
    let helper = if u.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let e1 = u.cross(&helper).normalize();
    let e2 = u.cross(&e1);
    let r = (1.0 - d * d / 4.0).sqrt();
    let x = (a + b) / 2.0 + (e1 * phase.cos() + e2 * phase.sin()) * r;
    let (na, nb) = (x - a, x - b);
    std::f64::consts::PI - na.dot(&nb).clamp(-1.0, 1.0).acos()
}

/// Strict linear system `a · t < b` decided by Fourier-Motzkin elimination.
fn strictly_feasible(mut rows: Vec<(Vec<f64>, f64)>, vars: usize) -> bool {
    let normalize = |(a, b): (Vec<f64>, f64)| {
        let s = a.iter().fold(b.abs(), |m, x| m.max(x.abs()));
        if s == 0.0 {
            (a, b)
        } else {
            (a.iter().map(|x| x / s).collect(), b / s)
        }
    };
    for k in 0..vars {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for (a, b) in rows {
            if a[k] > 1e-14 {
                pos.push((a, b));
            } else if a[k] < -1e-14 {
                neg.push((a, b));
            } else {
                rest.push((a, b));
            }
        }
        for (ap, bp) in &pos {
            for (an, bn) in &neg {
                let (wp, wn) = (-an[k], ap[k]);
                let a: Vec<f64> = ap.iter().zip(an).map(|(x, y)| wp * x + wn * y).collect();
                rest.push(normalize((a, wp * bp + wn * bn)));
            }
        }
        rows = rest;
    }
    rows.iter().all(|(_, b)| *b > 1e-10)
}

/// Orthonormal basis of the complement of the span of `rows`.
fn complement(rows: &[Vec3]) -> Vec<Vec3> {
    let mut basis: Vec<Vec3> = Vec::new();
    for r in rows {
        let mut v = *r;
        for b in &basis {
            v -= b * b.dot(&v);
        }
        if v.norm() > 1e-9 {
            basis.push(v.normalize());
        }
    }
    let rank = basis.len();
    for e in [Vec3::x(), Vec3::y(), Vec3::z()] {
        let mut v = e;
        for b in &basis {
            v -= b * b.dot(&v);
        }
        if v.norm() > 1e-6 {
            basis.push(v.normalize());
        }
    }
    basis.split_off(rank)
}

/// Every index set `I` for which some sphere passes through `c_I` and
/// strictly encloses the other points: the cells of the farthest-point
/// Delaunay complex, found by enumerating all subsets.
pub fn delaunay_oracle(pts: &[Point3]) -> BTreeSet<Vec<usize>> {
    let n = pts.len();
    let mut out = BTreeSet::new();
    for mask in 1u32..(1 << n) {
        let set: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let i0 = set[0];
        let c0 = pts[i0];
        // equidistance: 2 o·(c_i − c_0) = |c_i|² − |c_0|²
        let normals: Vec<Vec3> = set[1..].iter().map(|&i| (pts[i] - c0) * 2.0).collect();
        let rhs: Vec<f64> = set[1..].iter().map(|&i| pts[i].norm_squared() - c0.norm_squared()).collect();
        let Some(o0) = particular_solution(&normals, &rhs) else { continue };
        let free = complement(&normals);
        // others strictly closer: 2 o·(c_0 − c_j) < |c_0|² − |c_j|²
        let rows: Vec<(Vec<f64>, f64)> = (0..n)
            .filter(|j| !set.contains(j))
            .map(|j| {
                let g = (c0 - pts[j]) * 2.0;
                let a = free.iter().map(|f| g.dot(f)).collect();
                (a, c0.norm_squared() - pts[j].norm_squared() - g.dot(&o0))
            })
            .collect();
        if strictly_feasible(rows, free.len()) {
            out.insert(set);
        }
    }
    out
}

/// Least-squares solution of `normals[k] · o = rhs[k]`, or `None` when the
/// system is inconsistent.
fn particular_solution(normals: &[Vec3], rhs: &[f64]) -> Option<Point3> {
    if normals.is_empty() {
        return Some(Point3::zeros());
    }
    let a = nalgebra::DMatrix::from_fn(normals.len(), 3, |r, c| normals[r][c]);
    let b = nalgebra::DVector::from_column_slice(rhs);
    let svd = a.clone().svd(true, true);
    let x = svd.solve(&b, 1e-10).ok()?;
    let residual = (&a * &x - &b).amax();
    (residual < 1e-9).then(|| Point3::new(x[0], x[1], x[2]))
}

/// Volume of the convex hull of points in general position, from the
/// triangles that have every other point strictly on one side.
pub fn hull_volume_oracle(pts: &[Point3]) -> f64 {
    let n = pts.len();
    let inside = pts.iter().sum::<Point3>() / n as f64;
    let mut vol = 0.0;
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let normal = (pts[b] - pts[a]).cross(&(pts[c] - pts[a]));
                let sides: Vec<f64> = (0..n)
                    .filter(|&k| k != a && k != b && k != c)
                    .map(|k| normal.dot(&(pts[k] - pts[a])))
                    .collect();
                if sides.iter().all(|s| *s < 0.0) || sides.iter().all(|s| *s > 0.0) {
                    vol += normal.dot(&(pts[a] - inside)).abs() / 6.0;
                }
            }
        }
    }
    vol
}

/// Directions spread evenly over the unit sphere.
pub fn sphere_directions(n: usize) -> Vec<Vec3> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * k as f64;
            Vec3::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}

/// Whether some sampled point of sphere `i` lies strictly inside every other
/// ball, which witnesses that ball `i` cannot be dropped.
pub fn essential_by_sampling(pts: &[Point3], i: usize, dirs: &[Vec3]) -> bool {
    dirs.iter().any(|u| {
        let x = pts[i] + u;
        pts.iter()
            .enumerate()
            .all(|(j, c)| j == i || (x - c).norm() < 1.0 - 1e-12)
    })
}

pub fn circumradius(p: &[Point3]) -> f64 {
    let a = Matrix3::from_rows(&[
        (p[1] - p[0]).transpose() * 2.0,
        (p[2] - p[0]).transpose() * 2.0,
        (p[3] - p[0]).transpose() * 2.0,
    ]);
    let b = Vector3::new(
        p[1].norm_squared() - p[0].norm_squared(),
        p[2].norm_squared() - p[0].norm_squared(),
        p[3].norm_squared() - p[0].norm_squared(),
    );
    let o = a.lu().solve(&b).unwrap();
    (o - p[0]).norm()
}

/// Q's 3-cells from the brute-force Delaunay cells: those whose circumcenter
/// is within distance 1 of every center.
pub fn q_oracle(pts: &[Point3]) -> BTreeSet<Vec<usize>> {
    delaunay_oracle(pts)
        .into_iter()
        .filter(|s| s.len() == 4)
        .filter(|s| circumradius(&s.iter().map(|&i| pts[i]).collect::<Vec<_>>()) < 1.0)
        .collect()
}

pub fn boundary_triangles(cells: &BTreeSet<Vec<usize>>) -> BTreeSet<Vec<usize>> {
    let mut count: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for c in cells {
        for skip in 0..4 {
            let t: Vec<usize> = (0..4).filter(|&k| k != skip).map(|k| c[k]).collect();
            *count.entry(t).or_default() += 1;
        }
    }
    count.into_iter().filter(|(_, n)| *n == 1).map(|(t, _)| t).collect()
}

/// Closed triangulated surface that is a 2-sphere: every edge in two
/// triangles, every vertex link one cycle, Euler characteristic 2.
pub fn is_sphere(tris: &BTreeSet<Vec<usize>>) -> bool {
    let mut edges: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut verts = BTreeSet::new();
    for t in tris {
        verts.extend(t.iter().copied());
        for (a, b) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
            *edges.entry((a, b)).or_default() += 1;
        }
    }
    if edges.values().any(|&n| n != 2) {
        return false;
    }
    for &v in &verts {
        let link: Vec<(usize, usize)> = tris
            .iter()
            .filter(|t| t.contains(&v))
            .map(|t| {
                let o: Vec<usize> = t.iter().copied().filter(|&x| x != v).collect();
                (o[0], o[1])
            })
            .collect();
        // walk the link cycle
        let mut seen = 1;
        let (start, mut prev, mut cur) = (link[0].0, link[0].0, link[0].1);
        while cur != start {
            let next = link
                .iter()
                .find_map(|&(a, b)| match () {
                    _ if a == cur && b != prev => Some(b),
                    _ if b == cur && a != prev => Some(a),
                    _ => None,
                });
            let Some(next) = next else { return false };
            prev = cur;
            cur = next;
            seen += 1;
            if seen > link.len() {
                return false;
            }
        }
        if seen != link.len() {
            return false;
        }
    }
    verts.len() as i64 - edges.len() as i64 + tris.len() as i64 == 2
}

pub fn rigidity_nullity(pts: &[Point3], tris: &BTreeSet<Vec<usize>>) -> usize {
    let verts: Vec<usize> = tris.iter().flatten().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let local: BTreeMap<usize, usize> = verts.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let edges: BTreeSet<(usize, usize)> = tris
        .iter()
        .flat_map(|t| [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])])
        .collect();
    let m = verts.len();
    let mut r = DMatrix::zeros(edges.len().max(3 * m), 3 * m);
    for (row, &(a, b)) in edges.iter().enumerate() {
        let d = pts[a] - pts[b];
        for k in 0..3 {
            r[(row, 3 * local[&a] + k)] = d[k];
            r[(row, 3 * local[&b] + k)] = -d[k];
        }
    }
    3 * m - r.rank(1e-8 * r.norm())
}

fn is_bijection(map: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    map.len() == n && map.iter().all(|&k| k < n && !std::mem::replace(&mut seen[k], true))
}

/// First failure of the anti-isomorphism, if any. Inclusion must reverse
/// element by element: vertex ⊂ edge, vertex ⊂ face and edge ⊂ face in the
/// first lattice exactly when the images satisfy the opposite inclusion.
pub fn anti_isomorphism_violation(a: &FaceLattice, b: &FaceLattice, m: &LatticeMaps) -> Option<String> {
    if !is_bijection(&m.vertex, b.n_faces) || !is_bijection(&m.edge, b.edge_faces.len()) || !is_bijection(&m.face, b.vertex_faces.len()) {
        return Some("maps are not bijections".into());
    }
    for (v, faces) in a.vertex_faces.iter().enumerate() {
        for f in 0..a.n_faces {
            let image = b.vertex_faces[m.face[f]].contains(&m.vertex[v]);
            if faces.contains(&f) != image {
                return Some(format!("vertex {v} face {f}"));
            }
        }
        for (e, ends) in a.edge_vertices.iter().enumerate() {
            let (x, y) = b.edge_faces[m.edge[e]];
            let image = x == m.vertex[v] || y == m.vertex[v];
            if ends.contains(&v) != image {
                return Some(format!("vertex {v} edge {e}"));
            }
        }
    }
    for (e, &(x, y)) in a.edge_faces.iter().enumerate() {
        for f in 0..a.n_faces {
            let image = b.edge_vertices[m.edge[e]].contains(&m.face[f]);
            if (x == f || y == f) != image {
                return Some(format!("edge {e} face {f}"));
            }
        }
    }
    None
}

/// Five centers whose farthest-point Delaunay complex has three tetrahedra,
/// one of them with circumradius above 1.
pub fn dropped_cell_fixture() -> CenterSet {
    CenterSet::from_points(vec![
        Point3::new(-0.04795347692116656, -0.05388211947077801, 0.1278033869981777),
        Point3::new(-0.11640637661586144, -0.08672570908782147, 0.05491380239121763),
        Point3::new(-0.038901924444189585, 0.2798897742443805, -0.04261539050153344),
        Point3::new(0.1877459752432952, 0.0030303961197431393, 0.1670335494802034),
        Point3::new(0.26298742044693285, -0.02432155381258525, 0.011186549476595564),
    ])
    .unwrap()
}
