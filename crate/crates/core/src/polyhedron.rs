//! Small convex-polyhedron utilities used by the Voronoi, truncation and
//! convexity checks: nearest-point queries in low dimension and brute-force
//! convex hulls of small point sets.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};

use crate::geom::{signed_volume, Point3, Vec3};

/// Linear constraint `normal · y ≥ offset` in `R^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Constraint {
    pub fn new(normal: Vec<f64>, offset: f64) -> Self {
        Self { normal, offset }
    }

    pub fn slack(&self, y: &[f64]) -> f64 {
        self.normal.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() - self.offset
    }
}

/// Nearest point of `{y : a_k · y ≥ b_k}` to `target`, by enumerating every
/// candidate active set of at most `m` constraints.
///
/// Exact up to rounding for the small `m ≤ 3` problems used here. Constraint
/// normals are normalized first; `feas_tol` is the accepted violation in the
/// normalized units. Returns `None` when the polyhedron is empty.
pub fn nearest_point(target: &[f64], constraints: &[Constraint], feas_tol: f64) -> Option<Vec<f64>> {
    let m = target.len();
    let mut cons: Vec<Constraint> = Vec::with_capacity(constraints.len());
    for c in constraints {
        let norm = c.normal.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= 1e-300 {
            // 0 ≥ offset
            if c.offset > feas_tol {
                return None;
            }
            continue;
        }
        cons.push(Constraint::new(c.normal.iter().map(|x| x / norm).collect(), c.offset / norm));
    }
    let feasible = |y: &[f64]| cons.iter().all(|c| c.slack(y) >= -feas_tol);
    if feasible(target) {
        return Some(target.to_vec());
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut subset = Vec::with_capacity(m);
    for size in 1..=m.min(cons.len()) {
        for_each_subset(cons.len(), size, &mut subset, &mut |idx| {
            if let Some(y) = project_onto_flat(target, idx.iter().map(|&k| &cons[k])) {
                if feasible(&y) {
                    let d: f64 = y.iter().zip(target).map(|(a, b)| (a - b) * (a - b)).sum();
                    if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                        best = Some((d, y));
                    }
                }
            }
        });
    }
    best.map(|(_, y)| y)
}

/// Orthogonal projection of `target` onto `{y : a_k · y = b_k}`; `None` when
/// the normals are (numerically) dependent.
fn project_onto_flat<'a>(target: &[f64], cons: impl Iterator<Item = &'a Constraint>) -> Option<Vec<f64>> {
    let cons: Vec<&Constraint> = cons.collect();
    let k = cons.len();
    let m = target.len();
    let a = DMatrix::from_fn(k, m, |r, c| cons[r].normal[c]);
    let y0 = DVector::from_column_slice(target);
    let rhs = DVector::from_fn(k, |r, _| cons[r].offset) - &a * &y0;
    let gram = &a * a.transpose();
    // normals are unit length, so the Gram determinant measures independence directly
    if gram.determinant().abs() < 1e-12 {
        return None;
    }
    let lambda = gram.lu().solve(&rhs)?;
    let y = y0 + a.transpose() * lambda;
    Some(y.iter().copied().collect())
}

fn for_each_subset(n: usize, size: usize, buf: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, size: usize, buf: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if buf.len() == size {
            f(buf);
            return;
        }
        for i in start..n {
            if n - i < size - buf.len() {
                break;
            }
            buf.push(i);
            rec(i + 1, n, size, buf, f);
            buf.pop();
        }
    }
    buf.clear();
    rec(0, n, size, buf, f);
}

/// How far `points[i]` sticks out of the convex hull of the other points: the
/// largest `t` such that some plane through `points[i]` has every other point
/// at distance at least `t` on one side. `None` when `points[i]` lies in the
/// convex hull of the others.
pub fn extreme_margin(points: &[Point3], i: usize) -> Option<f64> {
    if points.len() == 1 {
        return Some(f64::INFINITY);
    }
    let cons: Vec<Constraint> = points
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != i)
        .map(|(_, p)| {
            let d = points[i] - p;
            Constraint::new(vec![d.x, d.y, d.z], 1.0)
        })
        .collect();
    // min |w| subject to w·(p_i − p_k) ≥ 1; the margin is 1/|w*|
    let raw_feasible = |w: &[f64]| {
        cons.iter().all(|c| c.normal.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() >= 1.0 - 1e-9)
    };
    let w = nearest_point(&[0.0, 0.0, 0.0], &cons, 1e-12)?;
    if !raw_feasible(&w) {
        return None;
    }
    let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    Some(1.0 / norm)
}

/// A facet of a convex hull: the indices of all input points on its plane,
/// in counterclockwise order seen from outside, and its outward unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct HullFacet {
    pub vertices: Vec<usize>,
    pub normal: Vec3,
}

/// Brute-force convex hull of a small, full-dimensional point set.
///
/// A triple spans a facet when all points lie on one side of its plane within
/// `eps`; coplanar triples are merged into one polygonal facet.
pub fn convex_hull_facets(points: &[Point3], eps: f64) -> Vec<HullFacet> {
    let n = points.len();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut facets = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let nrm = (points[b] - points[a]).cross(&(points[c] - points[a]));
                if nrm.norm() <= eps * (points[b] - points[a]).norm().max(1e-300) {
                    continue;
                }
                let nrm = nrm.normalize();
                let side = |p: &Point3| nrm.dot(&(p - points[a]));
                let (mut pos, mut neg) = (false, false);
                let mut on = Vec::new();
                for (k, p) in points.iter().enumerate() {
                    let s = side(p);
                    if s > eps {
                        pos = true;
                    } else if s < -eps {
                        neg = true;
                    } else {
                        on.push(k);
                    }
                }
                if pos && neg {
                    continue;
                }
                if !seen.insert(on.clone()) {
                    continue;
                }
                // outward normal points away from the rest of the hull
                let outward = if pos { -nrm } else { nrm };
                let ordered = order_polygon(points, &on, &outward);
                facets.push(HullFacet {
                    vertices: ordered,
                    normal: outward,
                });
            }
        }
    }
    facets
}

/// Orders coplanar points counterclockwise about `normal`, keeping only the
/// corners of their convex hull.
pub fn order_polygon(points: &[Point3], idx: &[usize], normal: &Vec3) -> Vec<usize> {
    let centroid = idx.iter().fold(Vec3::zeros(), |acc, &k| acc + points[k]) / idx.len() as f64;
    let reference = points[idx[0]] - centroid;
    let mut with_angle: Vec<(f64, usize)> = idx
        .iter()
        .map(|&k| (crate::geom::ccw_angle(&reference, &(points[k] - centroid), normal), k))
        .collect();
    with_angle.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let ring: Vec<usize> = with_angle.into_iter().map(|(_, k)| k).collect();
    // drop points lying on the polygon boundary between corners
    let len = ring.len();
    if len <= 3 {
        return ring;
    }
    let scale = idx.iter().map(|&k| (points[k] - centroid).norm()).fold(0.0, f64::max);
    ring.iter()
        .enumerate()
        .filter(|&(i, &k)| {
            let prev = points[ring[(i + len - 1) % len]];
            let next = points[ring[(i + 1) % len]];
            let turn = normal.dot(&(points[k] - prev).cross(&(next - points[k])));
            turn > 1e-12 * scale * scale
        })
        .map(|(_, &k)| k)
        .collect()
}

/// Volume of the convex hull of a full-dimensional point set.
pub fn convex_hull_volume(points: &[Point3], eps: f64) -> f64 {
    let facets = convex_hull_facets(points, eps);
    if facets.is_empty() {
        return 0.0;
    }
    let inner = points.iter().fold(Vec3::zeros(), |acc, p| acc + p) / points.len() as f64;
    facets
        .iter()
        .map(|f| {
            let v = &f.vertices;
            (1..v.len().saturating_sub(1))
                .map(|k| signed_volume(&inner, &points[v[0]], &points[v[k]], &points[v[k + 1]]).abs())
                .sum::<f64>()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn nearest_point_in_box() {
        // unit square [0,1]^2
        let cons = vec![
            Constraint::new(vec![1.0, 0.0], 0.0),
            Constraint::new(vec![-1.0, 0.0], -1.0),
            Constraint::new(vec![0.0, 1.0], 0.0),
            Constraint::new(vec![0.0, -1.0], -1.0),
        ];
        let y = nearest_point(&[2.0, 3.0], &cons, 1e-12).unwrap();
        assert_abs_diff_eq!(y[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(y[1], 1.0, epsilon = 1e-14);
        let y = nearest_point(&[0.5, -3.0], &cons, 1e-12).unwrap();
        assert_abs_diff_eq!(y[0], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(y[1], 0.0, epsilon = 1e-14);
        let inside = nearest_point(&[0.2, 0.3], &cons, 1e-12).unwrap();
        assert_eq!(inside, vec![0.2, 0.3]);
    }

    #[test]
    fn nearest_point_infeasible() {
        let cons = vec![Constraint::new(vec![1.0], 1.0), Constraint::new(vec![-1.0], 0.0)];
        assert!(nearest_point(&[0.0], &cons, 1e-12).is_none());
    }

    #[test]
    fn nearest_point_matches_dense_search() {
        // triangle x ≥ 0, y ≥ 0, x + y ≤ 1, target outside
        let cons = vec![
            Constraint::new(vec![1.0, 0.0], 0.0),
            Constraint::new(vec![0.0, 1.0], 0.0),
            Constraint::new(vec![-1.0, -1.0], -1.0),
        ];
        let target = [1.3, 0.9];
        let y = nearest_point(&target, &cons, 1e-12).unwrap();
        let mut best = f64::INFINITY;
        let steps = 400;
        for i in 0..=steps {
            for j in 0..=steps - i {
                let p = [i as f64 / steps as f64, j as f64 / steps as f64];
                best = best.min(((p[0] - target[0]).powi(2) + (p[1] - target[1]).powi(2)).sqrt());
            }
        }
        let d = ((y[0] - target[0]).powi(2) + (y[1] - target[1]).powi(2)).sqrt();
        assert!(d <= best + 1e-12);
        assert!(best - d < 5e-3);
    }

    #[test]
    fn extreme_margin_detects_interior_point() {
        let pts = vec![
            Point3::zeros(),
            Point3::x(),
            Point3::y(),
            Point3::z(),
            Point3::new(0.1, 0.1, 0.1),
        ];
        for i in 0..4 {
            assert!(extreme_margin(&pts, i).unwrap() > 0.1);
        }
        assert!(extreme_margin(&pts, 4).is_none());
    }

    #[test]
    fn cube_hull() {
        let mut pts = Vec::new();
        for x in [0.0, 1.0] {
            for y in [0.0, 1.0] {
                for z in [0.0, 1.0] {
                    pts.push(Point3::new(x, y, z));
                }
            }
        }
        pts.push(Point3::new(0.5, 0.5, 0.5));
        let facets = convex_hull_facets(&pts, 1e-9);
        assert_eq!(facets.len(), 6);
        assert!(facets.iter().all(|f| f.vertices.len() == 4));
        assert_abs_diff_eq!(convex_hull_volume(&pts, 1e-9), 1.0, epsilon = 1e-12);
        for f in &facets {
            // counterclockwise seen from outside
            let v = &f.vertices;
            let n = (pts[v[1]] - pts[v[0]]).cross(&(pts[v[2]] - pts[v[1]]));
            assert!(n.dot(&f.normal) > 0.0);
        }
    }
}
