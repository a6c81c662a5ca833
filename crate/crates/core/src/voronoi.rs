//! Farthest-point Voronoi tiling and farthest-point Delaunay complex of a
//! center set, by subset enumeration.
//!
//! The Voronoi cell of `c_i` is `{x : |x − c_i| ≥ |x − c_k| for all k}`. A
//! Delaunay cell is `conv{c_i : i ∈ I}` for an index set `I` admitting a
//! sphere through `{c_i : i ∈ I}` that has every other center strictly inside.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::ball::CenterSet;
use crate::exec::Execution;
use crate::geom::{affine_basis, affine_dimension, circumsphere, triangle_circumcircle, Point3, Tolerance, Vec3};
use crate::polyhedron::{convex_hull_facets, convex_hull_volume, nearest_point, order_polygon, Constraint};

/// Half-size of the box clipping unbounded Voronoi faces, relative to the
/// diameter of the center set.
const FACE_BOX: f64 = 1e4;

/// `normal · x ≥ offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HalfSpace {
    pub normal: Vec3,
    pub offset: f64,
}

impl HalfSpace {
    pub fn slack(&self, x: &Point3) -> f64 {
        self.normal.dot(x) - self.offset
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VoronoiCell {
    pub index: usize,
    /// One half-space per other center `k`: `|x − c_index| ≥ |x − c_k|`.
    pub halfspaces: Vec<(usize, HalfSpace)>,
    /// The cell has non-empty interior.
    pub nonempty: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VoronoiVertex {
    pub indices: Vec<usize>,
    pub position: Point3,
    /// Common distance to the centers in `indices`.
    pub radius: f64,
    /// More than four centers are farthest.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EdgeKind {
    Segment,
    Ray,
    Line,
}

/// The points `origin + s·direction`, `s ∈ [s_lo, s_hi]`, where the centers
/// in `indices` are farthest. `origin` is the circumcenter of those centers
/// and `radius` their circumradius, so the farthest distance at parameter `s`
/// is `sqrt(radius² + s²)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VoronoiEdge {
    pub indices: Vec<usize>,
    pub origin: Point3,
    pub direction: Vec3,
    pub s_lo: f64,
    pub s_hi: f64,
    pub radius: f64,
    /// More than three centers are farthest.
    pub degenerate: bool,
}

impl VoronoiEdge {
    pub fn kind(&self) -> EdgeKind {
        match (self.s_lo.is_finite(), self.s_hi.is_finite()) {
            (true, true) => EdgeKind::Segment,
            (false, false) => EdgeKind::Line,
            _ => EdgeKind::Ray,
        }
    }

    pub fn point_at(&self, s: f64) -> Point3 {
        self.origin + self.direction * s
    }

    /// A point in the relative interior.
    pub fn interior_point(&self) -> Point3 {
        self.point_at(interior_parameter(self.s_lo, self.s_hi))
    }
}

fn interior_parameter(lo: f64, hi: f64) -> f64 {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => 0.5 * (lo + hi),
        (true, false) => lo.max(0.0) + 1.0,
        (false, true) => hi.min(0.0) - 1.0,
        (false, false) => 0.0,
    }
}

/// The part of the bisector plane of two centers where they are farthest.
/// Unbounded faces are clipped to a large box.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VoronoiFace {
    pub indices: Vec<usize>,
    pub polygon: Vec<Point3>,
    pub bounded: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum FeatureKind {
    Vertex,
    Edge,
    Face,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VoronoiComplex {
    pub cells: Vec<VoronoiCell>,
    pub vertices: Vec<VoronoiVertex>,
    pub edges: Vec<VoronoiEdge>,
    pub faces: Vec<VoronoiFace>,
}

impl VoronoiComplex {
    /// `(kind, index set, degenerate)` for every feature.
    pub fn features(&self) -> Vec<(FeatureKind, Vec<usize>, bool)> {
        let mut out = Vec::new();
        out.extend(self.vertices.iter().map(|v| (FeatureKind::Vertex, v.indices.clone(), v.degenerate)));
        out.extend(self.edges.iter().map(|e| (FeatureKind::Edge, e.indices.clone(), e.degenerate)));
        out.extend(self.faces.iter().map(|f| (FeatureKind::Face, f.indices.clone(), false)));
        out
    }
}

/// Relative tolerance for comparing distances of size `r`.
fn dist_tol(tol: &Tolerance, r: f64) -> f64 {
    tol.eps_geom * r.max(1.0)
}

fn farthest_set(points: &[Point3], x: &Point3, tol: &Tolerance) -> (Vec<usize>, f64) {
    let dists: Vec<f64> = points.iter().map(|c| (x - c).norm()).collect();
    let r = dists.iter().copied().fold(0.0, f64::max);
    let eps = dist_tol(tol, r);
    ((0..points.len()).filter(|&k| r - dists[k] <= eps).collect(), r)
}

fn cell_halfspaces(points: &[Point3], i: usize) -> Vec<(usize, HalfSpace)> {
    let ci = points[i];
    (0..points.len())
        .filter(|&k| k != i)
        .map(|k| {
            let ck = points[k];
            (
                k,
                HalfSpace {
                    normal: ck - ci,
                    offset: 0.5 * (ck.norm_squared() - ci.norm_squared()),
                },
            )
        })
        .collect()
}

fn diameter(points: &[Point3]) -> f64 {
    let mut d: f64 = 0.0;
    for a in points {
        for b in points {
            d = d.max((a - b).norm());
        }
    }
    d
}

pub fn build_voronoi(centers: &CenterSet) -> VoronoiComplex {
    build_voronoi_with(centers, Execution::default())
}

pub fn build_voronoi_with(centers: &CenterSet, exec: Execution) -> VoronoiComplex {
    let pts = centers.centers();
    let tol = *centers.tolerance();
    let n = pts.len();
    let scale = diameter(pts).max(1e-6);

    let cells = exec.map_range(n, |i| {
        let halfspaces = cell_halfspaces(pts, i);
        // interior exists iff the strict system is feasible; by homogeneity a
        // fixed positive margin decides it
        let cons: Vec<Constraint> = halfspaces
            .iter()
            .map(|(_, h)| {
                let norm = h.normal.norm();
                Constraint::new(vec![h.normal.x, h.normal.y, h.normal.z], h.offset + norm * scale)
            })
            .collect();
        let nonempty = n == 1 || nearest_point(&[0.0; 3], &cons, tol.eps_geom).is_some();
        VoronoiCell {
            index: i,
            halfspaces,
            nonempty,
        }
    });

    let mut vertices: BTreeMap<Vec<usize>, VoronoiVertex> = BTreeMap::new();
    let found = exec.flat_map_range(n, |a| {
        let mut out = Vec::new();
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let Some(s) = circumsphere(&pts[a], &pts[b], &pts[c], &pts[d], &tol) else {
                        continue;
                    };
                    let (indices, r) = farthest_set(pts, &s.center, &tol);
                    if [a, b, c, d].iter().all(|k| indices.contains(k)) {
                        out.push(VoronoiVertex {
                            degenerate: indices.len() > 4,
                            indices,
                            position: s.center,
                            radius: r,
                        });
                    }
                }
            }
        }
        out
    });
    for v in found {
        vertices.entry(v.indices.clone()).or_insert(v);
    }

    let mut edges: BTreeMap<Vec<usize>, VoronoiEdge> = BTreeMap::new();
    let found = exec.flat_map_range(n, |a| {
        let mut out = Vec::new();
        for b in a + 1..n {
            for c in b + 1..n {
                if let Some(e) = voronoi_edge(pts, [a, b, c], &tol) {
                    out.push(e);
                }
            }
        }
        out
    });
    for e in found {
        edges.entry(e.indices.clone()).or_insert(e);
    }

    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let faces: Vec<VoronoiFace> = exec
        .map(&pairs, |&(i, j)| voronoi_face(pts, i, j, scale, &tol))
        .into_iter()
        .flatten()
        .collect();

    VoronoiComplex {
        cells,
        vertices: vertices.into_values().collect(),
        edges: edges.into_values().collect(),
        faces,
    }
}

fn voronoi_edge(pts: &[Point3], triple: [usize; 3], tol: &Tolerance) -> Option<VoronoiEdge> {
    let [a, b, c] = triple;
    let (o, r, nu) = triangle_circumcircle(&pts[a], &pts[b], &pts[c], tol.eps_geom)?;
    let ca = pts[a];
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for (k, ck) in pts.iter().enumerate() {
        if triple.contains(&k) {
            continue;
        }
        // |x − c_a|² ≥ |x − c_k|² along x = o + s·ν, scaled to unit normal
        let w = ck - ca;
        let wn = w.norm();
        let slope = nu.dot(&w) / wn;
        let rhs = (0.5 * (ck.norm_squared() - ca.norm_squared()) - o.dot(&w)) / wn;
        if slope.abs() <= 1e-12 {
            if rhs > tol.eps_geom {
                return None;
            }
        } else if slope > 0.0 {
            lo = lo.max(rhs / slope);
        } else {
            hi = hi.min(rhs / slope);
        }
    }
    if hi - lo <= tol.eps_geom {
        return None;
    }
    let mid = o + nu * interior_parameter(lo, hi);
    let (indices, _) = farthest_set(pts, &mid, tol);
    if !triple.iter().all(|k| indices.contains(k)) {
        return None;
    }
    Some(VoronoiEdge {
        degenerate: indices.len() > 3,
        indices,
        origin: o,
        direction: nu,
        s_lo: lo,
        s_hi: hi,
        radius: r,
    })
}

fn voronoi_face(pts: &[Point3], i: usize, j: usize, scale: f64, tol: &Tolerance) -> Option<VoronoiFace> {
    let ci = pts[i];
    let cj = pts[j];
    let normal = (cj - ci).normalize();
    let mid = (ci + cj) * 0.5;
    let helper = if normal.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let e1 = normal.cross(&helper).normalize();
    let e2 = normal.cross(&e1);
    let centroid = pts.iter().sum::<Point3>() / pts.len() as f64;
    let base = mid + e1 * e1.dot(&(centroid - mid)) + e2 * e2.dot(&(centroid - mid));
    let half = FACE_BOX * scale;
    let mut poly: Vec<(f64, f64)> = vec![(-half, -half), (half, -half), (half, half), (-half, half)];
    for (k, ck) in pts.iter().enumerate() {
        if k == i || k == j {
            continue;
        }
        // |x − c_i|² ≥ |x − c_k|² in plane coordinates
        let w = ck - ci;
        let wn = w.norm();
        let (gu, gv) = (e1.dot(&w) / wn, e2.dot(&w) / wn);
        let g0 = (base.dot(&w) - 0.5 * (ck.norm_squared() - ci.norm_squared())) / wn;
        poly = clip(&poly, |(u, v)| g0 + gu * u + gv * v);
        if poly.len() < 3 {
            return None;
        }
    }
    let area = polygon_area(&poly);
    if area <= tol.eps_geom * scale * scale {
        return None;
    }
    let to_3d = |(u, v): (f64, f64)| base + e1 * u + e2 * v;
    let (cu, cv) = poly.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    let inner = to_3d((cu / poly.len() as f64, cv / poly.len() as f64));
    let (indices, _) = farthest_set(pts, &inner, tol);
    if indices != [i, j] {
        return None;
    }
    let bounded = poly
        .iter()
        .all(|&(u, v)| u.abs() < half * (1.0 - 1e-9) && v.abs() < half * (1.0 - 1e-9));
    Some(VoronoiFace {
        indices,
        polygon: poly.into_iter().map(to_3d).collect(),
        bounded,
    })
}

/// Clip a convex polygon to `{p : g(p) ≥ 0}` for an affine `g`.
fn clip(poly: &[(f64, f64)], g: impl Fn((f64, f64)) -> f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    for k in 0..poly.len() {
        let p = poly[k];
        let q = poly[(k + 1) % poly.len()];
        let (gp, gq) = (g(p), g(q));
        if gp >= 0.0 {
            out.push(p);
        }
        if (gp >= 0.0) != (gq >= 0.0) {
            let t = gp / (gp - gq);
            out.push((p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1)));
        }
    }
    out
}

fn polygon_area(poly: &[(f64, f64)]) -> f64 {
    let mut a = 0.0;
    for k in 0..poly.len() {
        let p = poly[k];
        let q = poly[(k + 1) % poly.len()];
        a += p.0 * q.1 - p.1 * q.0;
    }
    0.5 * a.abs()
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct DelaunayCell {
    pub dimension: usize,
    pub indices: Vec<usize>,
}

impl DelaunayCell {
    pub fn volume(&self, points: &[Point3]) -> f64 {
        if self.dimension < 3 {
            return 0.0;
        }
        let pts: Vec<Point3> = self.indices.iter().map(|&i| points[i]).collect();
        convex_hull_volume(&pts, 1e-12)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DelaunayComplex {
    /// Sorted by dimension, then index set.
    pub cells: Vec<DelaunayCell>,
}

impl DelaunayComplex {
    pub fn cells_of_dim(&self, d: usize) -> impl Iterator<Item = &DelaunayCell> {
        self.cells.iter().filter(move |c| c.dimension == d)
    }

    pub fn contains(&self, indices: &[usize]) -> bool {
        self.find(indices).is_some()
    }

    pub fn find(&self, indices: &[usize]) -> Option<usize> {
        self.cells.iter().position(|c| c.indices == indices)
    }

    pub fn index_sets(&self) -> BTreeSet<Vec<usize>> {
        self.cells.iter().map(|c| c.indices.clone()).collect()
    }

    pub fn total_volume(&self, points: &[Point3]) -> f64 {
        self.cells_of_dim(3).map(|c| c.volume(points)).sum()
    }

    pub fn max_dimension(&self) -> usize {
        self.cells.iter().map(|c| c.dimension).max().unwrap_or(0)
    }
}

pub fn build_delaunay(centers: &CenterSet) -> DelaunayComplex {
    build_delaunay_with(centers, Execution::default())
}

pub fn build_delaunay_with(centers: &CenterSet, exec: Execution) -> DelaunayComplex {
    let pts = centers.centers();
    let tol = *centers.tolerance();
    let n = pts.len();
    let mut cells: BTreeSet<DelaunayCell> = BTreeSet::new();
    let scale = diameter(pts).max(1e-6);
    let dim = affine_dimension(pts, tol.eps_geom * scale);

    match dim {
        0 => {
            cells.insert(DelaunayCell {
                dimension: 0,
                indices: vec![0],
            });
        }
        1 => {
            let basis = affine_basis(pts, tol.eps_geom * scale);
            let dir = (pts[basis[1]] - pts[basis[0]]).normalize();
            let key = |k: &usize| dir.dot(&pts[*k]);
            let lo = (0..n).min_by(|a, b| key(a).total_cmp(&key(b))).unwrap();
            let hi = (0..n).max_by(|a, b| key(a).total_cmp(&key(b))).unwrap();
            cells.insert(DelaunayCell {
                dimension: 1,
                indices: vec![lo.min(hi), lo.max(hi)],
            });
        }
        2 => {
            let tops = exec.flat_map_range(n, |a| {
                let mut out = Vec::new();
                for b in a + 1..n {
                    for c in b + 1..n {
                        let Some((o, _, _)) = triangle_circumcircle(&pts[a], &pts[b], &pts[c], tol.eps_geom) else {
                            continue;
                        };
                        let (indices, _) = farthest_set(pts, &o, &tol);
                        if [a, b, c].iter().all(|k| indices.contains(k)) {
                            out.push(indices);
                        }
                    }
                }
                out
            });
            for indices in tops {
                cells.insert(DelaunayCell { dimension: 2, indices });
            }
        }
        _ => {
            let tops = exec.flat_map_range(n, |a| {
                let mut out = Vec::new();
                for b in a + 1..n {
                    for c in b + 1..n {
                        for d in c + 1..n {
                            let Some(s) = circumsphere(&pts[a], &pts[b], &pts[c], &pts[d], &tol) else {
                                continue;
                            };
                            let (indices, _) = farthest_set(pts, &s.center, &tol);
                            if [a, b, c, d].iter().all(|k| indices.contains(k)) {
                                out.push(indices);
                            }
                        }
                    }
                }
                out
            });
            for indices in tops {
                cells.insert(DelaunayCell { dimension: 3, indices });
            }
        }
    }

    let tops: Vec<DelaunayCell> = cells.iter().cloned().collect();
    for top in tops {
        add_faces(&top, pts, &mut cells);
    }
    DelaunayComplex {
        cells: {
            let mut v: Vec<DelaunayCell> = cells.into_iter().collect();
            v.sort();
            v
        },
    }
}

/// Insert every proper face of `cell`.
fn add_faces(cell: &DelaunayCell, pts: &[Point3], cells: &mut BTreeSet<DelaunayCell>) {
    let local: Vec<Point3> = cell.indices.iter().map(|&i| pts[i]).collect();
    let mut polygons: Vec<Vec<usize>> = Vec::new();
    match cell.dimension {
        3 => {
            for facet in convex_hull_facets(&local, 1e-12) {
                polygons.push(facet.vertices.iter().map(|&k| cell.indices[k]).collect());
            }
        }
        2 => {
            let normal = {
                let b = affine_basis(&local, 1e-12);
                (local[b[1]] - local[b[0]]).cross(&(local[b[2]] - local[b[0]]))
            };
            let all: Vec<usize> = (0..local.len()).collect();
            polygons.push(order_polygon(&local, &all, &normal).iter().map(|&k| cell.indices[k]).collect());
        }
        1 => {
            for &i in &cell.indices {
                cells.insert(DelaunayCell {
                    dimension: 0,
                    indices: vec![i],
                });
            }
            return;
        }
        _ => return,
    }
    for poly in polygons {
        if cell.dimension == 3 {
            let mut idx = poly.clone();
            idx.sort_unstable();
            cells.insert(DelaunayCell {
                dimension: 2,
                indices: idx,
            });
        }
        for k in 0..poly.len() {
            let (a, b) = (poly[k], poly[(k + 1) % poly.len()]);
            cells.insert(DelaunayCell {
                dimension: 1,
                indices: vec![a.min(b), a.max(b)],
            });
            cells.insert(DelaunayCell {
                dimension: 0,
                indices: vec![a],
            });
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CorrespondenceReport {
    pub violations: Vec<String>,
    /// Mismatches involving degenerate features, exempt from the strict check.
    pub degenerate: Vec<String>,
}

impl CorrespondenceReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Vertices of V match 3-cells of D, edges match 2-cells and faces match
/// segments, each by index set and in both directions.
pub fn check_feature_correspondence(v: &VoronoiComplex, d: &DelaunayComplex) -> CorrespondenceReport {
    let mut report = CorrespondenceReport::default();
    let mut push = |degenerate: bool, msg: String| {
        if degenerate {
            report.degenerate.push(msg)
        } else {
            report.violations.push(msg)
        }
    };
    let cells_by_dim = |dim: usize| -> BTreeSet<Vec<usize>> { d.cells_of_dim(dim).map(|c| c.indices.clone()).collect() };
    let groups: [(FeatureKind, usize, usize); 3] =
        [(FeatureKind::Vertex, 3, 4), (FeatureKind::Edge, 2, 3), (FeatureKind::Face, 1, 2)];
    let features = v.features();
    for (kind, dim, generic) in groups {
        let cells = cells_by_dim(dim);
        let feats: BTreeMap<Vec<usize>, bool> = features
            .iter()
            .filter(|f| f.0 == kind)
            .map(|f| (f.1.clone(), f.2))
            .collect();
        for (idx, &deg) in &feats {
            if !cells.contains(idx) {
                push(deg, format!("{kind:?} {idx:?} has no {dim}-cell"));
            }
        }
        for idx in &cells {
            if !feats.contains_key(idx) {
                push(idx.len() > generic, format!("{dim}-cell {idx:?} has no {kind:?}"));
            }
        }
    }
    report
}
