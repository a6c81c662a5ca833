//! Infinitesimal rigidity of bar-joint frameworks, and the convexity
//! hypotheses on `Q`.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::ball::CenterSet;
use crate::error::{Error, Result};
use crate::geom::{affine_dimension, signed_volume, Point3, Tolerance, Vec3};
use crate::polyhedron::{convex_hull_facets, convex_hull_volume, extreme_margin};
use crate::truncated::PolyhedronQ;
use crate::voronoi::DelaunayComplex;

/// Projection residual above which a unit flex counts as non-trivial.
pub const TRIVIAL_RESIDUAL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Framework {
    positions: Vec<Point3>,
    edges: Vec<(usize, usize)>,
}

impl Framework {
    pub fn new(positions: Vec<Point3>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &(a, b) in &edges {
            if a == b || a >= positions.len() || b >= positions.len() {
                return Err(Error::Precondition(format!("invalid edge ({a}, {b})")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::Precondition(format!("repeated edge ({a}, {b})")));
            }
        }
        if positions.is_empty() {
            return Err(Error::Precondition("framework without vertices".into()));
        }
        Ok(Framework { positions, edges })
    }

    /// Edge graph of `∂Q`, on the vertices of Q in ascending center order.
    pub fn of_boundary(q: &PolyhedronQ, centers: &CenterSet) -> Result<(Self, Vec<usize>)> {
        let verts: Vec<usize> = q.boundary_of_dim(0).map(|c| c.indices[0]).collect();
        let local = |i: usize| verts.binary_search(&i).expect("edge endpoint is a boundary vertex");
        let edges = q
            .boundary_of_dim(1)
            .map(|c| (local(c.indices[0]), local(c.indices[1])))
            .collect();
        let positions = verts.iter().map(|&i| *centers.center(i)).collect();
        Ok((Framework::new(positions, edges)?, verts))
    }

    pub fn positions(&self) -> &[Point3] {
        &self.positions
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.positions.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RigidityMatrixData {
    /// One row per edge, `3m` columns.
    pub matrix: DMatrix<f64>,
    /// All `3m` singular values in descending order, zeros included.
    pub singular_values: Vec<f64>,
    pub threshold: f64,
    pub rank: usize,
    pub nullity: usize,
    /// Some singular value lies within a factor 10 of the threshold.
    pub ill_conditioned: bool,
    /// Orthonormal kernel basis.
    pub kernel: Vec<DVector<f64>>,
}

pub fn rigidity_matrix(f: &Framework, tol: &Tolerance) -> RigidityMatrixData {
    let m = f.positions.len();
    let cols = 3 * m;
    let mut matrix = DMatrix::zeros(f.edges.len(), cols);
    for (r, &(i, j)) in f.edges.iter().enumerate() {
        let d = f.positions[i] - f.positions[j];
        for k in 0..3 {
            matrix[(r, 3 * i + k)] = d[k];
            matrix[(r, 3 * j + k)] = -d[k];
        }
    }
    // pad to at least square so the SVD returns a full right basis
    let rows = f.edges.len().max(cols);
    let mut padded = DMatrix::zeros(rows, cols);
    padded.view_mut((0, 0), (f.edges.len(), cols)).copy_from(&matrix);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let singular_values: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    let sigma_max = singular_values.first().copied().unwrap_or(0.0);
    let threshold = tol.eps_rank * sigma_max;
    let rank = singular_values.iter().filter(|&&s| s > threshold).count();
    let ill_conditioned = sigma_max > 0.0
        && singular_values
            .iter()
            .any(|&s| s > threshold / 10.0 && s < threshold * 10.0);
    let kernel = order
        .iter()
        .filter(|&&k| svd.singular_values[k] <= threshold)
        .map(|&k| v_t.row(k).transpose())
        .collect();
    RigidityMatrixData {
        matrix,
        singular_values,
        threshold,
        rank,
        nullity: cols - rank,
        ill_conditioned,
        kernel,
    }
}

/// Orthonormal basis of the infinitesimal rigid motions `q_i = t + ω × p_i`.
pub fn trivial_basis(positions: &[Point3]) -> Vec<DVector<f64>> {
    let m = positions.len();
    let mut raw: Vec<DVector<f64>> = Vec::new();
    for axis in [Vec3::x(), Vec3::y(), Vec3::z()] {
        raw.push(DVector::from_fn(3 * m, |r, _| axis[r % 3]));
    }
    for axis in [Vec3::x(), Vec3::y(), Vec3::z()] {
        raw.push(DVector::from_fn(3 * m, |r, _| axis.cross(&positions[r / 3])[r % 3]));
    }
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for mut v in raw {
        for b in &basis {
            let c = b.dot(&v);
            v -= b * c;
        }
        // drop directions that vanish, such as rotations about a line of collinear points
        if v.norm() > 1e-10 {
            basis.push(v.normalize());
        }
    }
    basis
}

/// Norm of the component of the unit flex `flex / |flex|` orthogonal to the
/// rigid motions.
pub fn nontrivial_residual(positions: &[Point3], flex: &DVector<f64>) -> f64 {
    let norm = flex.norm();
    if norm == 0.0 {
        return 0.0;
    }
    let mut r = flex / norm;
    for b in trivial_basis(positions) {
        let c = b.dot(&r);
        r -= b * c;
    }
    r.norm()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RigidityResult {
    pub rigid: bool,
    pub nullity: usize,
    pub rank: usize,
    pub ill_conditioned: bool,
    pub kernel: Vec<DVector<f64>>,
    /// Kernel directions orthogonal to the rigid motions.
    pub nontrivial_flexes: Vec<DVector<f64>>,
    pub singular_values: Vec<f64>,
}

pub fn is_infinitesimally_rigid(f: &Framework, tol: &Tolerance) -> Result<RigidityResult> {
    let dim = affine_dimension(&f.positions, tol.eps_geom);
    if dim < 3 {
        return Err(Error::DegenerateSpan(dim));
    }
    let data = rigidity_matrix(f, tol);
    let trivial = trivial_basis(&f.positions);
    let nontrivial_flexes = data
        .kernel
        .iter()
        .map(|k| {
            let mut r = k.clone();
            for b in &trivial {
                let c = b.dot(&r);
                r -= b * c;
            }
            r
        })
        .filter(|r| r.norm() > TRIVIAL_RESIDUAL)
        .collect();
    Ok(RigidityResult {
        rigid: data.nullity == 6,
        nullity: data.nullity,
        rank: data.rank,
        ill_conditioned: data.ill_conditioned,
        kernel: data.kernel,
        nontrivial_flexes,
        singular_values: data.singular_values,
    })
}

fn vertex_velocity(flex: &DVector<f64>, i: usize) -> Vec3 {
    Vec3::new(flex[3 * i], flex[3 * i + 1], flex[3 * i + 2])
}

/// `max_e |(p_i − p_j)·(q_i − q_j)| / |p_i − p_j|`, the largest first-order
/// change of an edge length.
pub fn flex_length_derivative(f: &Framework, flex: &DVector<f64>) -> f64 {
    f.edges
        .iter()
        .map(|&(i, j)| {
            let d = f.positions[i] - f.positions[j];
            let q = vertex_velocity(flex, i) - vertex_velocity(flex, j);
            d.dot(&q).abs() / d.norm()
        })
        .fold(0.0, f64::max)
}

/// Central finite-difference estimate of [`flex_length_derivative`].
pub fn flex_length_derivative_fd(f: &Framework, flex: &DVector<f64>, h: f64) -> f64 {
    f.edges
        .iter()
        .map(|&(i, j)| {
            let q = vertex_velocity(flex, i) - vertex_velocity(flex, j);
            let d = f.positions[i] - f.positions[j];
            (((d + q * h).norm() - (d - q * h).norm()) / (2.0 * h)).abs()
        })
        .fold(0.0, f64::max)
}

/// Edge graph of the convex hull of `points`; with `triangulate`, polygonal
/// facets get fan diagonals.
pub fn hull_framework(points: &[Point3], triangulate: bool) -> Result<Framework> {
    let mut edges = BTreeSet::new();
    for facet in convex_hull_facets(points, 1e-12) {
        let v = &facet.vertices;
        for k in 0..v.len() {
            let (a, b) = (v[k], v[(k + 1) % v.len()]);
            edges.insert((a.min(b), a.max(b)));
        }
        if triangulate {
            for k in 2..v.len().saturating_sub(1) {
                edges.insert((v[0].min(v[k]), v[0].max(v[k])));
            }
        }
    }
    Framework::new(points.to_vec(), edges.into_iter().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakConvexity {
    pub convex: bool,
    /// Smallest distance by which a vertex sticks out of the hull of the others.
    pub min_margin: f64,
    pub non_extreme: Vec<usize>,
}

/// Every vertex of Q is a vertex of the convex hull of Q's vertex set.
pub fn check_weakly_convex(q: &PolyhedronQ, centers: &CenterSet) -> WeakConvexity {
    weakly_convex_points(
        &q.vertex_set.iter().map(|&i| *centers.center(i)).collect::<Vec<_>>(),
        &q.vertex_set,
        centers.tolerance().eps_geom,
    )
}

pub fn weakly_convex_points(points: &[Point3], labels: &[usize], eps: f64) -> WeakConvexity {
    let mut min_margin = f64::INFINITY;
    let mut non_extreme = Vec::new();
    for (k, &label) in labels.iter().enumerate() {
        match extreme_margin(points, k) {
            Some(m) if m > eps => min_margin = min_margin.min(m),
            Some(m) => {
                min_margin = min_margin.min(m);
                non_extreme.push(label);
            }
            None => {
                min_margin = 0.0;
                non_extreme.push(label);
            }
        }
    }
    WeakConvexity {
        convex: non_extreme.is_empty(),
        min_margin,
        non_extreme,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoDecomposition {
    /// Delaunay 3-cells outside Q.
    pub complement: Vec<Vec<usize>>,
    /// Fan triangulation of the complement, as center indices.
    pub tetrahedra: Vec<[usize; 4]>,
    pub complement_volume: f64,
    pub q_volume: f64,
    pub hull_volume: f64,
}

fn fan_triangulation(cell: &[usize], points: &[Point3]) -> Vec<[usize; 4]> {
    let local: Vec<Point3> = cell.iter().map(|&i| points[i]).collect();
    let apex = 0;
    let mut out = Vec::new();
    for facet in convex_hull_facets(&local, 1e-12) {
        if facet.vertices.contains(&apex) {
            continue;
        }
        let v = &facet.vertices;
        for k in 1..v.len() - 1 {
            out.push([cell[apex], cell[v[0]], cell[v[k]], cell[v[k + 1]]]);
        }
    }
    out
}

/// The complement of Q in `conv C` is the union of the Delaunay 3-cells not
/// in Q; each is convex and is fan-triangulated from its lowest-index vertex.
pub fn check_codecomposable(q: &PolyhedronQ, d: &DelaunayComplex, centers: &CenterSet) -> Result<CoDecomposition> {
    let pts = centers.centers();
    let eps = centers.tolerance().eps_geom;
    for t in &q.three_cells {
        for f in d.cells_of_dim(2).filter(|f| f.indices.iter().all(|i| t.contains(i))) {
            if !q.cells.iter().any(|c| c.indices == f.indices) {
                return Err(Error::CorruptedComplex(format!(
                    "face {:?} of 3-cell {:?} is missing from Q",
                    f.indices, t
                )));
            }
        }
    }
    let complement: Vec<Vec<usize>> = d
        .cells_of_dim(3)
        .filter(|c| !q.three_cells.contains(&c.indices))
        .map(|c| c.indices.clone())
        .collect();
    let mut tetrahedra = Vec::new();
    let mut complement_volume = 0.0;
    for cell in &complement {
        let local: Vec<Point3> = cell.iter().map(|&i| pts[i]).collect();
        if !weakly_convex_points(&local, cell, eps).convex {
            return Err(Error::ComplementNotConvex(cell.clone()));
        }
        let tets = fan_triangulation(cell, pts);
        let fan: f64 = tets
            .iter()
            .map(|t| signed_volume(&pts[t[0]], &pts[t[1]], &pts[t[2]], &pts[t[3]]).abs())
            .sum();
        let vol = convex_hull_volume(&local, 1e-12);
        if (fan - vol).abs() > 1e-9 * vol.max(1e-12) {
            return Err(Error::CorruptedComplex(format!(
                "fan of {cell:?} has volume {fan}, the cell {vol}"
            )));
        }
        complement_volume += vol;
        tetrahedra.extend(tets);
    }
    let q_volume: f64 = q
        .three_cells
        .iter()
        .map(|t| convex_hull_volume(&t.iter().map(|&i| pts[i]).collect::<Vec<_>>(), 1e-12))
        .sum();
    let hull_volume = convex_hull_volume(pts, 1e-12);
    if (q_volume + complement_volume - hull_volume).abs() > 1e-6 * hull_volume {
        return Err(Error::CorruptedComplex(format!(
            "Q and its complement have volume {}, the hull {hull_volume}",
            q_volume + complement_volume
        )));
    }
    Ok(CoDecomposition {
        complement,
        tetrahedra,
        complement_volume,
        q_volume,
        hull_volume,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn single_bar() {
        let f = Framework::new(vec![Point3::zeros(), Point3::x()], vec![(0, 1)]).unwrap();
        let data = rigidity_matrix(&f, &tol());
        assert_eq!(data.matrix.shape(), (1, 6));
        assert_eq!(data.nullity, 5);
        assert_eq!(data.kernel.len(), 5);
        assert!(matches!(is_infinitesimally_rigid(&f, &tol()), Err(Error::DegenerateSpan(1))));
    }

    #[test]
    fn framework_validation() {
        assert!(Framework::new(vec![Point3::zeros(), Point3::x()], vec![(0, 0)]).is_err());
        assert!(Framework::new(vec![Point3::zeros(), Point3::x()], vec![(0, 1), (1, 0)]).is_err());
        assert!(Framework::new(vec![Point3::zeros()], vec![(0, 2)]).is_err());
    }

    #[test]
    fn k4_is_rigid() {
        let pts = vec![Point3::zeros(), Point3::x(), Point3::y(), Point3::z()];
        let f = Framework::new(pts, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let data = rigidity_matrix(&f, &tol());
        assert_eq!(data.matrix.shape(), (6, 12));
        assert_eq!(data.rank, 6);
        let r = is_infinitesimally_rigid(&f, &tol()).unwrap();
        assert!(r.rigid);
        assert!(r.nontrivial_flexes.is_empty());
    }

    #[test]
    fn planar_square_mechanism() {
        let pts = vec![Point3::zeros(), Point3::x(), Point3::new(1.0, 1.0, 0.0), Point3::y()];
        let f = Framework::new(pts.clone(), vec![(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let data = rigidity_matrix(&f, &tol());
        assert!(data.nullity > 6);
        let nontrivial: Vec<_> = data.kernel.iter().filter(|k| nontrivial_residual(&pts, k) > 0.1).collect();
        assert!(!nontrivial.is_empty());
        for k in nontrivial {
            assert!(flex_length_derivative(&f, k) <= 1e-8);
        }
    }

    #[test]
    fn rigid_motions_do_not_change_lengths() {
        let pts = vec![Point3::new(0.3, 0.1, 0.0), Point3::x(), Point3::y(), Point3::new(0.2, 0.4, 0.9)];
        let f = Framework::new(pts.clone(), vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let m = pts.len();
        let t = DVector::from_fn(3 * m, |r, _| [0.3, -0.2, 0.5][r % 3]);
        assert_eq!(flex_length_derivative(&f, &t), 0.0);
        let w = Vec3::new(0.2, -1.0, 0.4);
        let rot = DVector::from_fn(3 * m, |r, _| w.cross(&pts[r / 3])[r % 3]);
        assert!(flex_length_derivative(&f, &rot) <= 1e-12);
        assert_abs_diff_eq!(flex_length_derivative_fd(&f, &rot, 1e-6), 0.0, epsilon = 1e-5);
        assert!(nontrivial_residual(&pts, &rot) < 1e-12);
        assert_eq!(trivial_basis(&pts).len(), 6);
    }

    #[test]
    fn cube_edges_flex_octahedron_does_not() {
        let mut cube = Vec::new();
        for &x in &[0.0, 1.0] {
            for &y in &[0.0, 1.0] {
                for &z in &[0.0, 1.0] {
                    cube.push(Point3::new(x, y, z));
                }
            }
        }
        let f = hull_framework(&cube, false).unwrap();
        assert_eq!(f.edges().len(), 12);
        let r = is_infinitesimally_rigid(&f, &tol()).unwrap();
        assert!(!r.rigid && r.nullity > 6);
        let tri = hull_framework(&cube, true).unwrap();
        assert_eq!(tri.edges().len(), 18);
        assert!(is_infinitesimally_rigid(&tri, &tol()).unwrap().rigid);

        let oct = vec![Point3::x(), -Point3::x(), Point3::y(), -Point3::y(), Point3::z(), -Point3::z()];
        let f = hull_framework(&oct, false).unwrap();
        assert_eq!(f.edges().len(), 12);
        let r = is_infinitesimally_rigid(&f, &tol()).unwrap();
        assert!(r.rigid);
        assert_eq!(r.nullity, 6);
    }

    #[test]
    fn interior_point_breaks_weak_convexity() {
        let pts = vec![Point3::zeros(), Point3::x(), Point3::y(), Point3::z(), Point3::repeat(0.1)];
        let w = weakly_convex_points(&pts, &[0, 1, 2, 3, 4], 1e-9);
        assert!(!w.convex);
        assert_eq!(w.non_extreme, vec![4]);
        assert!(weakly_convex_points(&pts[..4], &[0, 1, 2, 3], 1e-9).convex);
    }

    #[test]
    fn fan_covers_a_cube() {
        let mut cube = Vec::new();
        for &x in &[0.0, 1.0] {
            for &y in &[0.0, 1.0] {
                for &z in &[0.0, 1.0] {
                    cube.push(Point3::new(x, y, z));
                }
            }
        }
        let cell: Vec<usize> = (0..8).collect();
        let tets = fan_triangulation(&cell, &cube);
        let vol: f64 = tets
            .iter()
            .map(|t| signed_volume(&cube[t[0]], &cube[t[1]], &cube[t[2]], &cube[t[3]]).abs())
            .sum();
        assert_eq!(tets.len(), 6);
        assert_abs_diff_eq!(vol, 1.0, epsilon = 1e-12);
    }
}
