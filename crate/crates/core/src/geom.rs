//! Points, circles, arcs and spheres, plus the tolerance-aware predicates
//! the rest of the crate is built on.
//!
//! Every predicate takes an explicit [`Tolerance`]. Near-degenerate inputs
//! are pushed to the degenerate branch rather than the generic one.

use std::f64::consts::TAU;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point3 = Vector3<f64>;
pub type Vec3 = Vector3<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Predicate tolerance in length units.
    pub eps_geom: f64,
    /// Relative singular-value threshold for numeric rank.
    pub eps_rank: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            eps_geom: 1e-9,
            eps_rank: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn new(eps_geom: f64, eps_rank: f64) -> Result<Self> {
        let tol = Self { eps_geom, eps_rank };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0 && x < 1e-3;
        if !ok(self.eps_geom) {
            return Err(Error::InvalidTolerance(format!(
                "eps_geom = {} outside (0, 1e-3)",
                self.eps_geom
            )));
        }
        if !ok(self.eps_rank) {
            return Err(Error::InvalidTolerance(format!(
                "eps_rank = {} outside (0, 1e-3)",
                self.eps_rank
            )));
        }
        Ok(())
    }

    /// Radius used when merging vertex candidates produced by different triples.
    pub fn merge_radius(&self) -> f64 {
        10.0 * self.eps_geom
    }
}

/// Circle in space. `normal` is a unit vector; the positive sense of rotation
/// is counterclockwise about it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle3 {
    pub center: Point3,
    pub radius: f64,
    pub normal: Vec3,
}

impl Circle3 {
    /// Orthonormal in-plane frame `(e1, e2)` with `e1 × e2 = normal`.
    ///
    /// `e1` is the normalized projection of +x onto the circle plane, or of +y
    /// when +x is (nearly) parallel to the normal.
    pub fn frame(&self) -> (Vec3, Vec3) {
        let n = self.normal;
        let project = |v: Vec3| v - n * n.dot(&v);
        let mut e1 = project(Vec3::x());
        if e1.norm() < 1e-3 {
            e1 = project(Vec3::y());
        }
        let e1 = e1.normalize();
        let e2 = n.cross(&e1);
        (e1, e2)
    }

    /// Angle of `p` around the circle in `[0, 2π)`, measured from the frame's `e1`.
    pub fn angle_of(&self, p: &Point3) -> f64 {
        let (e1, e2) = self.frame();
        let r = p - self.center;
        let a = r.dot(&e2).atan2(r.dot(&e1));
        if a < 0.0 {
            a + TAU
        } else {
            a
        }
    }

    pub fn point_at_angle(&self, theta: f64) -> Point3 {
        let (e1, e2) = self.frame();
        self.center + (e1 * theta.cos() + e2 * theta.sin()) * self.radius
    }

    /// Unit tangent at `p` in the counterclockwise sense.
    pub fn tangent_at(&self, p: &Point3) -> Vec3 {
        self.normal.cross(&(p - self.center)).normalize()
    }

    pub fn is_degenerate(&self, tol: &Tolerance) -> bool {
        self.radius <= tol.eps_geom
    }
}

/// Counterclockwise arc of a [`Circle3`] from `start` to `end`.
///
/// A full circle has `full = true`, `sweep = 2π` and `start == end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc3 {
    pub circle: Circle3,
    pub start: Point3,
    pub end: Point3,
    pub start_angle: f64,
    pub sweep: f64,
    pub full: bool,
}

impl Arc3 {
    pub fn between(circle: Circle3, start_angle: f64, sweep: f64) -> Self {
        Self {
            circle,
            start: circle.point_at_angle(start_angle),
            end: circle.point_at_angle(start_angle + sweep),
            start_angle,
            sweep,
            full: false,
        }
    }

    pub fn full_circle(circle: Circle3) -> Self {
        let start = circle.point_at_angle(0.0);
        Self {
            circle,
            start,
            end: start,
            start_angle: 0.0,
            sweep: TAU,
            full: true,
        }
    }

    /// Point at parameter `t ∈ [0, 1]` along the arc.
    pub fn point_at(&self, t: f64) -> Point3 {
        self.circle.point_at_angle(self.start_angle + t * self.sweep)
    }

    pub fn midpoint(&self) -> Point3 {
        self.point_at(0.5)
    }

    pub fn length(&self) -> f64 {
        self.circle.radius * self.sweep
    }

    /// Distance from `x` to the arc.
    pub fn distance_to(&self, x: &Point3) -> f64 {
        let c = &self.circle;
        let r = x - c.center;
        let planar = r - c.normal * c.normal.dot(&r);
        let mut best = (x - self.start).norm().min((x - self.end).norm());
        if planar.norm() > 1e-15 {
            let theta = c.angle_of(&(c.center + planar));
            let mut offset = theta - self.start_angle;
            offset = offset.rem_euclid(TAU);
            if self.full || offset <= self.sweep {
                best = best.min((x - c.point_at_angle(theta)).norm());
            }
        } else {
            best = best.min((r.norm_squared() + c.radius * c.radius).sqrt());
        }
        best
    }

    /// `samples + 1` evenly spaced points from start to end inclusive.
    pub fn sample(&self, samples: usize) -> Vec<Point3> {
        (0..=samples)
            .map(|k| self.point_at(k as f64 / samples as f64))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphere {
    pub center: Point3,
    pub radius: f64,
}

/// Intersection circle of the unit spheres around `c1` and `c2`.
///
/// Returns `None` when the spheres are disjoint and a radius-0 circle when
/// they are tangent within `eps_geom`.
pub fn sphere_pair_circle(c1: &Point3, c2: &Point3, tol: &Tolerance) -> Result<Option<Circle3>> {
    let axis = c2 - c1;
    let d = axis.norm();
    if d <= tol.eps_geom {
        return Err(Error::CoincidentCenters);
    }
    let center = (c1 + c2) * 0.5;
    let normal = axis / d;
    if (d - 2.0).abs() <= tol.eps_geom {
        return Ok(Some(Circle3 {
            center,
            radius: 0.0,
            normal,
        }));
    }
    if d > 2.0 {
        return Ok(None);
    }
    Ok(Some(Circle3 {
        center,
        radius: (1.0 - d * d / 4.0).sqrt(),
        normal,
    }))
}

/// Circumcenter and circumradius of a triangle, or `None` when the three
/// points are collinear within `eps`.
pub fn triangle_circumcircle(a: &Point3, b: &Point3, c: &Point3, eps: f64) -> Option<(Point3, f64, Vec3)> {
    let u = b - a;
    let v = c - a;
    let n = u.cross(&v);
    let un = u.norm();
    let vn = v.norm();
    if un <= eps || vn <= eps {
        return None;
    }
    // distance of c from the line ab, and of b from the line ac
    if n.norm() / un <= eps || n.norm() / vn <= eps {
        return None;
    }
    let n2 = n.norm_squared();
    let offset = (v.cross(&n) * u.norm_squared() + n.cross(&u) * v.norm_squared()) / (2.0 * n2);
    Some((a + offset, offset.norm(), n / n2.sqrt()))
}

/// All points at unit distance from each of the three centers.
///
/// The two solutions are mirror images across the plane of the centers and are
/// returned on the side of the plane normal `(c2 − c1) × (c3 − c1)` first.
pub fn triple_points(c1: &Point3, c2: &Point3, c3: &Point3, tol: &Tolerance) -> Result<Vec<Point3>> {
    let (o, r, n) = triangle_circumcircle(c1, c2, c3, tol.eps_geom).ok_or(Error::DegenerateTriple)?;
    if (r - 1.0).abs() <= tol.eps_geom {
        return Ok(vec![o]);
    }
    if r > 1.0 {
        return Ok(Vec::new());
    }
    let h = (1.0 - r * r).sqrt();
    Ok(vec![o + n * h, o - n * h])
}

/// Sphere through four points, `None` when they are coplanar within `eps_geom`.
pub fn circumsphere(p1: &Point3, p2: &Point3, p3: &Point3, p4: &Point3, tol: &Tolerance) -> Option<Sphere> {
    let a = p2 - p1;
    let b = p3 - p1;
    let c = p4 - p1;
    let det = a.dot(&b.cross(&c));
    let scale = a.norm().max(b.norm()).max(c.norm()).max((p3 - p2).norm()).max((p4 - p2).norm()).max((p4 - p3).norm());
    // |det| / scale² bounds the height of the lowest vertex over its opposite face from below
    if scale <= tol.eps_geom || det.abs() <= tol.eps_geom * scale * scale {
        return None;
    }
    let offset = (b.cross(&c) * a.norm_squared() + c.cross(&a) * b.norm_squared() + a.cross(&b) * c.norm_squared())
        / (2.0 * det);
    Some(Sphere {
        center: p1 + offset,
        radius: offset.norm(),
    })
}

/// Center and radius of the smallest sphere through all `points`, which must
/// be affinely independent (1 to 4 of them).
pub fn affine_circumcenter(points: &[Point3]) -> Option<(Point3, f64)> {
    match points {
        [] => None,
        [p] => Some((*p, 0.0)),
        [p, q] => Some(((p + q) * 0.5, (p - q).norm() * 0.5)),
        _ if points.len() <= 4 => {
            let p0 = points[0];
            let k = points.len() - 1;
            let dirs: Vec<Vec3> = points[1..].iter().map(|p| p - p0).collect();
            let mut gram = Matrix3::<f64>::identity();
            let mut rhs = Vector3::<f64>::zeros();
            for i in 0..k {
                for j in 0..k {
                    gram[(i, j)] = dirs[i].dot(&dirs[j]);
                }
                rhs[i] = 0.5 * dirs[i].norm_squared();
            }
            let lambda = gram.lu().solve(&rhs)?;
            if !lambda.iter().all(|x| x.is_finite()) {
                return None;
            }
            let center = dirs.iter().enumerate().fold(p0, |acc, (i, d)| acc + d * lambda[i]);
            Some((center, (center - p0).norm()))
        }
        _ => None,
    }
}

/// Dimension of the affine hull of `points`, deciding each step by the
/// distance of the farthest remaining point from the current flat.
pub fn affine_dimension(points: &[Point3], eps: f64) -> usize {
    affine_basis(points, eps).len().saturating_sub(1)
}

/// Indices of a greedily chosen affinely independent subset spanning the
/// affine hull of `points` (up to 4 of them).
pub fn affine_basis(points: &[Point3], eps: f64) -> Vec<usize> {
    if points.is_empty() {
        return Vec::new();
    }
    let mut basis = vec![0usize];
    let mut dirs: Vec<Vec3> = Vec::new();
    while basis.len() < 4 {
        let p0 = points[basis[0]];
        let residual = |p: &Point3| {
            let mut r = p - p0;
            for d in &dirs {
                r -= d * d.dot(&r);
            }
            r
        };
        let best = points
            .iter()
            .enumerate()
            .map(|(i, p)| (i, residual(p)))
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()));
        match best {
            Some((i, r)) if r.norm() > eps => {
                basis.push(i);
                dirs.push(r.normalize());
            }
            _ => break,
        }
    }
    basis
}

/// Counterclockwise angle from `from` to `to` about `axis`, in `[0, 2π)`.
/// Both vectors are projected onto the plane orthogonal to `axis` first.
pub fn ccw_angle(from: &Vec3, to: &Vec3, axis: &Vec3) -> f64 {
    let n = axis.normalize();
    let a = from - n * n.dot(from);
    let b = to - n * n.dot(to);
    let ang = n.dot(&a.cross(&b)).atan2(a.dot(&b));
    if ang < 0.0 {
        ang + TAU
    } else {
        ang
    }
}

/// Signed volume of the tetrahedron `(a, b, c, d)`.
pub fn signed_volume(a: &Point3, b: &Point3, c: &Point3, d: &Point3) -> f64 {
    (b - a).dot(&(c - a).cross(&(d - a))) / 6.0
}
