//! The truncated Delaunay complex `D^t`, the polyhedron `Q` formed by its
//! 3-cells, and the correspondences between `∂Q` and the ball-polyhedron.
//!
//! A Delaunay cell with index set `I` belongs to `D^t` when some point of
//! `∩{V_i : i ∈ I}` lies in `B(C)`. On that Voronoi feature every center of
//! `I` is farthest, so the test reduces to minimizing the distance to one of
//! them over the feature.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::ball::{BallPolyhedron, CenterSet};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geom::{affine_basis, affine_circumcenter, Point3, Vec3};
use crate::polyhedron::{nearest_point, Constraint};
use crate::simplicial::SimplicialComplex;
use crate::voronoi::{DelaunayCell, DelaunayComplex, HalfSpace, VoronoiCell, VoronoiComplex};

/// `V_i ∩ B(c_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedCell {
    pub index: usize,
    pub center: Point3,
    pub halfspaces: Vec<HalfSpace>,
}

impl TruncatedCell {
    pub fn new(cell: &VoronoiCell, center: Point3) -> Self {
        TruncatedCell {
            index: cell.index,
            center,
            halfspaces: cell.halfspaces.iter().map(|(_, h)| *h).collect(),
        }
    }

    pub fn contains(&self, x: &Point3, slack: f64) -> bool {
        (x - self.center).norm() <= 1.0 + slack
            && self
                .halfspaces
                .iter()
                .all(|h| h.slack(x) >= -slack * h.normal.norm().max(1.0))
    }
}

pub fn truncated_cells(centers: &CenterSet, v: &VoronoiComplex) -> Vec<TruncatedCell> {
    v.cells
        .iter()
        .map(|c| TruncatedCell::new(c, *centers.center(c.index)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncatedMember {
    pub cell: DelaunayCell,
    /// Point of the Voronoi co-feature closest to its farthest centers.
    pub witness: Point3,
    /// Distance from the witness to its farthest centers; below 1 for members.
    pub min_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncatedDelaunayComplex {
    /// Sorted like the parent complex.
    pub members: Vec<TruncatedMember>,
    /// Cells whose minimal distance is within `eps_geom` of 1, excluded.
    pub degenerate: Vec<TruncatedMember>,
    pub parent_cell_count: usize,
}

impl TruncatedDelaunayComplex {
    pub fn contains(&self, indices: &[usize]) -> bool {
        self.members.iter().any(|m| m.cell.indices == indices)
    }

    pub fn cells_of_dim(&self, d: usize) -> impl Iterator<Item = &DelaunayCell> {
        self.members.iter().map(|m| &m.cell).filter(move |c| c.dimension == d)
    }
}

/// Minimal farthest distance over the Voronoi co-feature of `indices`, with
/// the point attaining it. `None` when the co-feature is empty.
pub fn cofeature_min_distance(points: &[Point3], indices: &[usize], feas_tol: f64) -> Option<(Point3, f64)> {
    let sub: Vec<Point3> = indices.iter().map(|&i| points[i]).collect();
    let basis_idx = affine_basis(&sub, 1e-12);
    let basis_pts: Vec<Point3> = basis_idx.iter().map(|&k| sub[k]).collect();
    let (o, r) = affine_circumcenter(&basis_pts)?;
    // orthonormal basis of the directions orthogonal to aff(c_I)
    let mut span: Vec<Vec3> = Vec::new();
    for p in &basis_pts[1..] {
        let mut d = p - basis_pts[0];
        for s in &span {
            d -= s * s.dot(&d);
        }
        span.push(d.normalize());
    }
    let mut free: Vec<Vec3> = Vec::new();
    for cand in [Vec3::x(), Vec3::y(), Vec3::z()] {
        if span.len() + free.len() == 3 {
            break;
        }
        let mut d = cand;
        for s in span.iter().chain(free.iter()) {
            d -= s * s.dot(&d);
        }
        if d.norm() > 0.1 {
            free.push(d.normalize());
        }
    }
    let i0 = points[indices[0]];
    let members: BTreeSet<usize> = indices.iter().copied().collect();
    let cons: Vec<Constraint> = (0..points.len())
        .filter(|k| !members.contains(k))
        .map(|k| {
            // |x − c_i0|² ≥ |x − c_k|² at x = o + Σ y_t f_t
            let w = points[k] - i0;
            let offset = 0.5 * (points[k].norm_squared() - i0.norm_squared()) - o.dot(&w);
            Constraint::new(free.iter().map(|f| f.dot(&w)).collect(), offset)
        })
        .collect();
    if free.is_empty() {
        // a 3-cell: its circumcenter is the Voronoi vertex
        return Some((o, r));
    }
    let y = nearest_point(&vec![0.0; free.len()], &cons, feas_tol)?;
    let x = free.iter().zip(&y).fold(o, |acc, (f, t)| acc + f * *t);
    Some((x, (x - i0).norm()))
}

pub fn build_truncated_delaunay(centers: &CenterSet, v: &VoronoiComplex, d: &DelaunayComplex) -> TruncatedDelaunayComplex {
    build_truncated_delaunay_with(centers, v, d, Execution::default())
}

/// The Voronoi complex only fixes which features exist; membership is decided
/// from the center coordinates.
pub fn build_truncated_delaunay_with(
    centers: &CenterSet,
    _v: &VoronoiComplex,
    d: &DelaunayComplex,
    exec: Execution,
) -> TruncatedDelaunayComplex {
    let pts = centers.centers();
    let eps = centers.tolerance().eps_geom;
    let decided = exec.map(&d.cells, |cell| {
        let (witness, min_distance) = cofeature_min_distance(pts, &cell.indices, eps)?;
        Some(TruncatedMember {
            cell: cell.clone(),
            witness,
            min_distance,
        })
    });
    let mut members = Vec::new();
    let mut degenerate = Vec::new();
    for m in decided.into_iter().flatten() {
        if m.min_distance <= 1.0 - eps {
            members.push(m);
        } else if m.min_distance < 1.0 + eps {
            degenerate.push(m);
        }
    }
    TruncatedDelaunayComplex {
        members,
        degenerate,
        parent_cell_count: d.cells.len(),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CheckReport {
    pub violations: Vec<String>,
    /// Set when the check's preconditions do not hold.
    pub skipped: Option<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.skipped.is_none() && self.violations.is_empty()
    }

    fn skip(reason: &str) -> Self {
        CheckReport {
            violations: Vec::new(),
            skipped: Some(reason.to_string()),
        }
    }
}

/// `D^t ⊆ D`, and every Delaunay face of a member is a member.
pub fn check_subcomplex(dt: &TruncatedDelaunayComplex, d: &DelaunayComplex) -> CheckReport {
    let mut report = CheckReport::default();
    for m in &dt.members {
        if !d.contains(&m.cell.indices) {
            report.violations.push(format!("{:?} is not a Delaunay cell", m.cell.indices));
        }
        for y in &d.cells {
            let proper = y.indices.len() < m.cell.indices.len() && y.indices.iter().all(|i| m.cell.indices.contains(i));
            if proper && !dt.contains(&y.indices) {
                report
                    .violations
                    .push(format!("face {:?} of member {:?} is missing", y.indices, m.cell.indices));
            }
        }
    }
    report
}

/// No Voronoi vertex lies on `∂P` and no Voronoi edge touches `∂P` without
/// crossing it. Each decision requires a margin larger than `eps_geom`.
pub fn check_no_boundary_vertex(v: &VoronoiComplex, p: &BallPolyhedron) -> CheckReport {
    if !p.is_simple() {
        return CheckReport::skip("precondition not met: P is not simple");
    }
    let eps = p.centers().tolerance().eps_geom;
    let mut report = CheckReport::default();
    for vert in &v.vertices {
        if (vert.radius - 1.0).abs() <= eps {
            report
                .violations
                .push(format!("Voronoi vertex {:?} lies on the boundary", vert.indices));
        }
    }
    for e in &v.edges {
        if e.s_lo < 0.0 && e.s_hi > 0.0 && (e.radius - 1.0).abs() <= eps {
            report
                .violations
                .push(format!("Voronoi edge {:?} is tangent to the boundary", e.indices));
        }
    }
    report
}

/// Smallest gap between 1 and the farthest distance at a Voronoi vertex or
/// at the nearest point of a Voronoi edge whose nearest point is interior.
pub fn boundary_margin(v: &VoronoiComplex) -> f64 {
    let verts = v.vertices.iter().map(|x| (x.radius - 1.0).abs());
    let edges = v
        .edges
        .iter()
        .filter(|e| e.s_lo < 0.0 && e.s_hi > 0.0)
        .map(|e| (e.radius - 1.0).abs());
    verts.chain(edges).fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolyhedronQ {
    /// Index sets of the 3-cells.
    pub three_cells: Vec<Vec<usize>>,
    /// All faces of the 3-cells, including them.
    pub cells: Vec<DelaunayCell>,
    /// 2-cells in exactly one 3-cell, and their faces.
    pub boundary: Vec<DelaunayCell>,
    pub vertex_set: Vec<usize>,
}

impl PolyhedronQ {
    pub fn boundary_of_dim(&self, d: usize) -> impl Iterator<Item = &DelaunayCell> {
        self.boundary.iter().filter(move |c| c.dimension == d)
    }

    /// `(V, E, F)` of `∂Q`.
    pub fn boundary_f_vector(&self) -> [usize; 3] {
        [0, 1, 2].map(|d| self.boundary_of_dim(d).count())
    }

    pub fn all_boundary_triangles(&self) -> bool {
        self.boundary_of_dim(2).all(|c| c.indices.len() == 3)
    }

    /// Complex generated by the 2-faces of `∂Q`.
    pub fn boundary_complex(&self) -> SimplicialComplex {
        SimplicialComplex::generated_by(self.boundary_of_dim(2).map(|c| c.indices.clone()))
    }

    /// 2-faces of Q with the number of 3-cells containing each.
    pub fn two_faces(&self) -> Vec<(&DelaunayCell, usize)> {
        self.cells
            .iter()
            .filter(|c| c.dimension == 2)
            .map(|c| {
                let count = self
                    .three_cells
                    .iter()
                    .filter(|t| c.indices.iter().all(|i| t.contains(i)))
                    .count();
                (c, count)
            })
            .collect()
    }

    /// Same polyhedron with one boundary 2-face removed from `∂Q`.
    pub fn without_boundary_face(&self, k: usize) -> PolyhedronQ {
        let mut q = self.clone();
        let target = q.boundary_of_dim(2).nth(k).cloned();
        if let Some(t) = target {
            q.boundary.retain(|c| *c != t);
        }
        q
    }
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.contains(x))
}

pub fn extract_q(dt: &TruncatedDelaunayComplex) -> Result<PolyhedronQ> {
    let three_cells: Vec<Vec<usize>> = dt.cells_of_dim(3).map(|c| c.indices.clone()).collect();
    if three_cells.is_empty() {
        return Err(Error::NoThreeCell);
    }
    let cells: Vec<DelaunayCell> = dt
        .members
        .iter()
        .map(|m| m.cell.clone())
        .filter(|c| three_cells.iter().any(|t| is_subset(&c.indices, t)))
        .collect();
    let boundary_faces: Vec<&DelaunayCell> = cells
        .iter()
        .filter(|c| c.dimension == 2)
        .filter(|c| three_cells.iter().filter(|t| is_subset(&c.indices, t)).count() == 1)
        .collect();
    let boundary: Vec<DelaunayCell> = cells
        .iter()
        .filter(|c| boundary_faces.iter().any(|f| is_subset(&c.indices, &f.indices)))
        .cloned()
        .collect();
    let vertex_set: Vec<usize> = cells
        .iter()
        .filter(|c| c.dimension == 0)
        .map(|c| c.indices[0])
        .collect();
    Ok(PolyhedronQ {
        three_cells,
        cells,
        boundary,
        vertex_set,
    })
}

fn simple_standard(p: &BallPolyhedron) -> Option<CheckReport> {
    if !p.is_simple() || !p.is_standard() {
        Some(CheckReport::skip("precondition not met: P is not simple and standard"))
    } else {
        None
    }
}

/// Triangles of `∂Q` correspond to vertices of P through the faces meeting there.
pub fn check_boundary_triangles(q: &PolyhedronQ, p: &BallPolyhedron) -> CheckReport {
    if let Some(r) = simple_standard(p) {
        return r;
    }
    let mut report = CheckReport::default();
    let tris: BTreeSet<Vec<usize>> = q.boundary_of_dim(2).map(|c| c.indices.clone()).collect();
    for c in q.boundary_of_dim(2).filter(|c| c.indices.len() != 3) {
        report
            .violations
            .push(format!("boundary face {:?} is not a triangle", c.indices));
    }
    let verts: BTreeSet<Vec<usize>> = p.vertices().iter().map(|v| v.balls.clone()).collect();
    for t in tris.difference(&verts) {
        report.violations.push(format!("triangle {t:?} has no vertex of P"));
    }
    for v in verts.difference(&tris) {
        report.violations.push(format!("vertex of P on faces {v:?} has no triangle"));
    }
    let (nt, nv) = (q.boundary_of_dim(2).count(), p.vertices().len());
    if nt != nv {
        report.violations.push(format!("{nt} boundary triangles but {nv} vertices of P"));
    }
    report
}

/// Nerve of the face family of P.
pub fn nerve_of_faces(p: &BallPolyhedron) -> SimplicialComplex {
    let mut nerve = SimplicialComplex::default();
    for f in p.faces() {
        nerve.insert_closed(&[f.ball]);
    }
    for e in p.edges() {
        nerve.insert_closed(&[e.balls.0, e.balls.1]);
    }
    for v in p.vertices() {
        nerve.insert_closed(&v.balls);
    }
    nerve
}

/// `c_i ↦ F_i` is an isomorphism from the complex of `∂Q` onto the nerve of
/// the faces of P, and that complex is a combinatorial 2-sphere.
pub fn check_nerve_isomorphism(q: &PolyhedronQ, p: &BallPolyhedron) -> CheckReport {
    if let Some(r) = simple_standard(p) {
        return r;
    }
    let mut report = CheckReport::default();
    let s = q.boundary_complex();
    let nerve = nerve_of_faces(p);
    let face_ball: Vec<usize> = p.faces().iter().map(|f| f.ball).collect();
    let image = s.relabel(|i| face_ball.get(i).copied().unwrap_or(usize::MAX));
    for x in image.simplices().filter(|x| !nerve.contains(x)) {
        report.violations.push(format!("{x:?} is not in the nerve"));
    }
    for x in nerve.simplices().filter(|x| !image.contains(x)) {
        report.violations.push(format!("nerve simplex {x:?} has no preimage"));
    }
    report.violations.extend(s.sphere_violations());
    report
}
