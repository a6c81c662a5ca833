//! Ball-polyhedra: intersections of closed unit balls.
//!
//! [`build`] computes the vertex-edge-face structure of `B(C)`:
//!
//! * vertices are boundary points on at least three generating spheres,
//! * edges are the maximal arcs of the pairwise intersection circles that
//!   lie in every ball, cut at vertices,
//! * the face of ball `i` is the part of its sphere on the boundary, with
//!   boundary cycles oriented counterclockwise seen from outside.
//!
//! On the sphere of ball `i` the face is the intersection of the spherical
//! caps `{u : u·(c_j − c_i) ≥ |c_j − c_i|²/2}`. Every such cap is smaller than
//! a hemisphere, so faces are spherically convex.

mod centers;
mod lattice;

use std::collections::BTreeMap;
use std::f64::consts::TAU;

pub use centers::{min_enclosing_ball, CenterSet};
pub use lattice::{double_dual_isomorphism, dual, DualPolyhedron, FaceLattice, LatticeMaps};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geom::{ccw_angle, sphere_pair_circle, triple_points, Arc3, Point3, Vec3};

#[derive(Debug, Clone, PartialEq)]
pub struct BPVertex {
    pub position: Point3,
    /// Indices of the balls whose sphere passes through the vertex, ascending.
    pub balls: Vec<usize>,
}

/// Edge between the faces of balls `balls.0 < balls.1`.
///
/// `arc` runs counterclockwise about its circle normal `c_j − c_i`, from the
/// `start` vertex to the `end` vertex. Full-circle edges have no vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct BPEdge {
    pub balls: (usize, usize),
    pub arc: Arc3,
    pub start: Option<usize>,
    pub end: Option<usize>,
}

impl BPEdge {
    pub fn is_full_circle(&self) -> bool {
        self.arc.full
    }

    pub fn endpoints(&self) -> Vec<usize> {
        match (self.start, self.end) {
            (Some(a), Some(b)) if a == b => vec![a],
            (Some(a), Some(b)) => vec![a, b],
            _ => Vec::new(),
        }
    }

    pub fn other_ball(&self, ball: usize) -> usize {
        if self.balls.0 == ball {
            self.balls.1
        } else {
            self.balls.0
        }
    }
}

/// An edge traversed in a face boundary cycle. `forward` means the edge is
/// walked from `start` to `end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrientedEdge {
    pub edge: usize,
    pub forward: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BPFace {
    pub ball: usize,
    /// Boundary cycles, counterclockwise seen from outside the sphere. Empty
    /// for a face covering its whole sphere.
    pub cycles: Vec<Vec<OrientedEdge>>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BuildOptions {
    /// Reject vertices lying on four or more spheres.
    pub strict: bool,
    pub exec: Option<Execution>,
}

#[derive(Debug, Clone)]
pub struct BallPolyhedron {
    centers: CenterSet,
    vertices: Vec<BPVertex>,
    edges: Vec<BPEdge>,
    faces: Vec<BPFace>,
    vertex_edges: Vec<Vec<usize>>,
}

/// Vertices and edges of `B(C)` for an arbitrary (not necessarily reduced) family.
struct Skeleton {
    vertices: Vec<BPVertex>,
    edges: Vec<BPEdge>,
}

fn skeleton(centers: &CenterSet, exec: Execution) -> Result<Skeleton> {
    let tol = *centers.tolerance();
    let pts = centers.centers();
    let n = pts.len();

    let candidates: Vec<Point3> = exec
        .flat_map_range(n, |i| {
            let mut out = Vec::new();
            for j in i + 1..n {
                for k in j + 1..n {
                    let Ok(found) = triple_points(&pts[i], &pts[j], &pts[k], &tol) else {
                        continue;
                    };
                    out.extend(found.into_iter().filter(|p| centers.contains(p, tol.eps_geom)));
                }
            }
            out
        });

    let merge = tol.merge_radius();
    let mut positions: Vec<Point3> = Vec::new();
    for p in candidates {
        if !positions.iter().any(|q| (q - p).norm() <= merge) {
            positions.push(p);
        }
    }
    let vertices: Vec<BPVertex> = positions
        .into_iter()
        .map(|position| BPVertex {
            balls: (0..n)
                .filter(|&k| ((position - pts[k]).norm() - 1.0).abs() <= merge)
                .collect(),
            position,
        })
        .collect();

    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let per_pair: Vec<Result<Vec<BPEdge>>> = exec.map(&pairs, |&(i, j)| {
        let Some(circle) = sphere_pair_circle(&pts[i], &pts[j], &tol)? else {
            return Ok(Vec::new());
        };
        if circle.is_degenerate(&tol) {
            return Ok(Vec::new());
        }
        let in_others = |p: &Point3| {
            pts.iter()
                .enumerate()
                .all(|(k, c)| k == i || k == j || (p - c).norm() <= 1.0 + tol.eps_geom)
        };
        let mut on_circle: Vec<(f64, usize)> = vertices
            .iter()
            .enumerate()
            .filter(|(_, v)| v.balls.contains(&i) && v.balls.contains(&j))
            .map(|(id, v)| (circle.angle_of(&v.position), id))
            .collect();
        on_circle.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        if on_circle.is_empty() {
            let arc = Arc3::full_circle(circle);
            return Ok(if in_others(&arc.start) && in_others(&arc.point_at(0.5)) {
                vec![BPEdge {
                    balls: (i, j),
                    arc,
                    start: None,
                    end: None,
                }]
            } else {
                Vec::new()
            });
        }
        let m = on_circle.len();
        let mut out = Vec::new();
        for a in 0..m {
            let (theta_a, va) = on_circle[a];
            let (theta_b, vb) = on_circle[(a + 1) % m];
            let mut sweep = theta_b - theta_a;
            if m == 1 || sweep <= 0.0 {
                sweep += TAU;
            }
            let arc = Arc3::between(circle, theta_a, sweep);
            if arc.length() <= merge || !in_others(&arc.midpoint()) {
                continue;
            }
            out.push(BPEdge {
                balls: (i, j),
                arc: Arc3 {
                    start: vertices[va].position,
                    end: vertices[vb].position,
                    ..arc
                },
                start: Some(va),
                end: Some(vb),
            });
        }
        Ok(out)
    });
    let mut edges = Vec::new();
    for e in per_pair {
        edges.extend(e?);
    }
    Ok(Skeleton { vertices, edges })
}

/// Indices of the centers whose face is non-empty.
pub fn reduce_indices(centers: &CenterSet) -> Result<Vec<usize>> {
    reduce_indices_with(centers, Execution::default())
}

pub fn reduce_indices_with(centers: &CenterSet, exec: Execution) -> Result<Vec<usize>> {
    if !centers.has_interior() {
        return Err(Error::NotABallPolyhedron);
    }
    if centers.len() == 1 {
        return Ok(vec![0]);
    }
    let sk = skeleton(centers, exec)?;
    let mut keep = vec![false; centers.len()];
    for e in &sk.edges {
        keep[e.balls.0] = true;
        keep[e.balls.1] = true;
    }
    Ok((0..centers.len()).filter(|&i| keep[i]).collect())
}

/// Smallest sub-family generating the same ball-polyhedron.
pub fn reduce(centers: &CenterSet) -> Result<CenterSet> {
    Ok(centers.subset(&reduce_indices(centers)?))
}

pub fn has_interior(centers: &CenterSet) -> bool {
    centers.has_interior()
}

pub fn build(centers: &CenterSet) -> Result<BallPolyhedron> {
    build_with(centers, BuildOptions::default())
}

pub fn build_with(centers: &CenterSet, opts: BuildOptions) -> Result<BallPolyhedron> {
    let exec = opts.exec.unwrap_or_default();
    if !centers.has_interior() {
        return Err(Error::NotABallPolyhedron);
    }
    let n = centers.len();
    if n == 1 {
        return Ok(BallPolyhedron {
            centers: centers.clone(),
            vertices: Vec::new(),
            edges: Vec::new(),
            faces: vec![BPFace {
                ball: 0,
                cycles: Vec::new(),
            }],
            vertex_edges: Vec::new(),
        });
    }
    let Skeleton { vertices, edges } = skeleton(centers, exec)?;
    if opts.strict {
        if let Some(v) = vertices.iter().find(|v| v.balls.len() >= 4) {
            return Err(Error::DegenerateConfiguration(format!(
                "vertex at {:?} lies on {} spheres",
                v.position.as_slice(),
                v.balls.len()
            )));
        }
    }
    let mut has_edge = vec![false; n];
    for e in &edges {
        has_edge[e.balls.0] = true;
        has_edge[e.balls.1] = true;
    }
    if let Some(i) = (0..n).find(|&i| !has_edge[i]) {
        return Err(Error::NotReduced(i));
    }

    let mut vertex_edges = vec![Vec::new(); vertices.len()];
    for (id, e) in edges.iter().enumerate() {
        for v in [e.start, e.end].into_iter().flatten() {
            vertex_edges[v].push(id);
        }
    }

    let mut poly = BallPolyhedron {
        centers: centers.clone(),
        vertices,
        edges,
        faces: Vec::new(),
        vertex_edges,
    };
    poly.faces = (0..n).map(|i| poly.trace_face(i)).collect::<Result<_>>()?;
    Ok(poly)
}

impl BallPolyhedron {
    pub fn centers(&self) -> &CenterSet {
        &self.centers
    }

    pub fn vertices(&self) -> &[BPVertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[BPEdge] {
        &self.edges
    }

    pub fn faces(&self) -> &[BPFace] {
        &self.faces
    }

    /// Edges incident to a vertex; an edge starting and ending at the vertex is listed twice.
    pub fn edges_at(&self, vertex: usize) -> &[usize] {
        &self.vertex_edges[vertex]
    }

    /// `(V, E, F)`.
    pub fn f_vector(&self) -> [usize; 3] {
        [self.vertices.len(), self.edges.len(), self.faces.len()]
    }

    pub fn euler_characteristic(&self) -> i64 {
        let [v, e, f] = self.f_vector();
        v as i64 - e as i64 + f as i64
    }

    /// Exactly three edges meet at every vertex.
    pub fn is_simple(&self) -> bool {
        self.vertex_edges.iter().all(|es| es.len() == 3)
    }

    /// Any two faces meet in nothing, one vertex or one edge, and any two
    /// edges share at most one vertex. Full-circle edges have no vertices at
    /// all and are rejected.
    pub fn is_standard(&self) -> bool {
        self.standardness_violations().is_empty()
    }

    pub fn standardness_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (id, e) in self.edges.iter().enumerate() {
            if e.is_full_circle() {
                out.push(format!("edge {id} is a full circle"));
            } else if e.start == e.end {
                out.push(format!("edge {id} is a loop at vertex {:?}", e.start));
            }
        }
        let n = self.faces.len();
        let mut edges_by_pair: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (id, e) in self.edges.iter().enumerate() {
            edges_by_pair.entry(e.balls).or_default().push(id);
        }
        for i in 0..n {
            for j in i + 1..n {
                let shared_edges = edges_by_pair.get(&(i, j)).map_or(&[][..], |v| v.as_slice());
                let shared_vertices: Vec<usize> = (0..self.vertices.len())
                    .filter(|&v| self.vertices[v].balls.contains(&i) && self.vertices[v].balls.contains(&j))
                    .collect();
                match shared_edges {
                    [] if shared_vertices.len() > 1 => out.push(format!(
                        "faces {i} and {j} meet in {} isolated vertices",
                        shared_vertices.len()
                    )),
                    [] => {}
                    [e] => {
                        let ends = self.edges[*e].endpoints();
                        if shared_vertices.iter().any(|v| !ends.contains(v)) {
                            out.push(format!("faces {i} and {j} meet in edge {e} and a further vertex"));
                        }
                    }
                    many => out.push(format!("faces {i} and {j} share {} edges", many.len())),
                }
            }
        }
        for a in 0..self.edges.len() {
            for b in a + 1..self.edges.len() {
                let ea = self.edges[a].endpoints();
                let common = self.edges[b].endpoints().iter().filter(|v| ea.contains(v)).count();
                if common > 1 {
                    out.push(format!("edges {a} and {b} share {common} vertices"));
                }
            }
        }
        out
    }

    /// Tangent at the start of an oriented edge, pointing along the walk.
    pub fn outgoing_tangent(&self, oe: OrientedEdge) -> Vec3 {
        let arc = &self.edges[oe.edge].arc;
        if oe.forward {
            arc.circle.tangent_at(&arc.start)
        } else {
            -arc.circle.tangent_at(&arc.end)
        }
    }

    /// Tangent at the end of an oriented edge, pointing back into the edge.
    pub fn incoming_back_tangent(&self, oe: OrientedEdge) -> Vec3 {
        let arc = &self.edges[oe.edge].arc;
        if oe.forward {
            -arc.circle.tangent_at(&arc.end)
        } else {
            arc.circle.tangent_at(&arc.start)
        }
    }

    pub fn oriented_start(&self, oe: OrientedEdge) -> Option<usize> {
        let e = &self.edges[oe.edge];
        if oe.forward {
            e.start
        } else {
            e.end
        }
    }

    pub fn oriented_end(&self, oe: OrientedEdge) -> Option<usize> {
        let e = &self.edges[oe.edge];
        if oe.forward {
            e.end
        } else {
            e.start
        }
    }

    /// The edge as walked along the boundary of the face of `ball`.
    pub fn orient_for_face(&self, edge: usize, ball: usize) -> OrientedEdge {
        OrientedEdge {
            edge,
            forward: self.edges[edge].balls.0 == ball,
        }
    }

    fn trace_face(&self, ball: usize) -> Result<BPFace> {
        let center = self.centers.center(ball);
        let directed: Vec<OrientedEdge> = self
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.balls.0 == ball || e.balls.1 == ball)
            .map(|(id, _)| self.orient_for_face(id, ball))
            .collect();
        let mut used = vec![false; directed.len()];
        let mut cycles = Vec::new();
        for s in 0..directed.len() {
            if used[s] {
                continue;
            }
            used[s] = true;
            let first = directed[s];
            if self.edges[first.edge].is_full_circle() {
                cycles.push(vec![first]);
                continue;
            }
            let mut cycle = vec![first];
            let mut cur = first;
            loop {
                let v = self.oriented_end(cur).expect("non-circle edge has endpoints");
                let candidates: Vec<usize> = (0..directed.len())
                    .filter(|&k| self.oriented_start(directed[k]) == Some(v))
                    .collect();
                let next = match candidates.as_slice() {
                    [] => {
                        return Err(Error::DegenerateConfiguration(format!(
                            "face {ball}: boundary does not close at vertex {v}"
                        )))
                    }
                    [only] => *only,
                    many => {
                        // first outgoing edge clockwise from the incoming one
                        let normal = self.vertices[v].position - center;
                        let back = self.incoming_back_tangent(cur);
                        *many
                            .iter()
                            .filter(|&&k| directed[k] != cur)
                            .min_by(|&&a, &&b| {
                                let ta = ccw_angle(&self.outgoing_tangent(directed[a]), &back, &normal);
                                let tb = ccw_angle(&self.outgoing_tangent(directed[b]), &back, &normal);
                                ta.total_cmp(&tb)
                            })
                            .expect("at least two candidates")
                    }
                };
                if next == s {
                    break;
                }
                if used[next] {
                    return Err(Error::DegenerateConfiguration(format!(
                        "face {ball}: boundary cycles cross at vertex {v}"
                    )));
                }
                used[next] = true;
                cycle.push(directed[next]);
                cur = directed[next];
            }
            cycles.push(cycle);
        }
        Ok(BPFace { ball, cycles })
    }

    /// Whether `x` lies in P, allowing `slack` beyond every unit sphere.
    pub fn contains(&self, x: &Point3, slack: f64) -> bool {
        self.centers.contains(x, slack)
    }

    /// Points of the face of `ball`: directions from a Fibonacci lattice of
    /// `directions` points kept when they land in P, plus `per_edge + 1`
    /// samples along every boundary edge.
    pub fn sample_face(&self, ball: usize, directions: usize, per_edge: usize) -> Vec<Point3> {
        let c = self.centers.center(ball);
        let slack = self.centers.tolerance().eps_geom;
        let mut out: Vec<Point3> = fibonacci_sphere(directions)
            .into_iter()
            .map(|u| c + u)
            .filter(|p| self.contains(p, slack))
            .collect();
        for e in self.edges.iter().filter(|e| e.balls.0 == ball || e.balls.1 == ball) {
            out.extend(e.arc.sample(per_edge));
        }
        out
    }

    /// Distance from `x` to the face of `ball`: to the radial projection of
    /// `x` when that lands in the face, otherwise to the nearest boundary arc.
    pub fn distance_to_face(&self, x: &Point3, ball: usize) -> f64 {
        let c = self.centers.center(ball);
        let r = x - c;
        let slack = 10.0 * self.centers.tolerance().eps_geom;
        if r.norm() > 1e-12 {
            let proj = c + r.normalize();
            if self.contains(&proj, slack) {
                return (x - proj).norm();
            }
        }
        self.edges
            .iter()
            .filter(|e| e.balls.0 == ball || e.balls.1 == ball)
            .map(|e| e.arc.distance_to(x))
            .fold(f64::INFINITY, f64::min)
    }
}

/// `n` nearly uniform unit vectors.
pub fn fibonacci_sphere(n: usize) -> Vec<Vec3> {
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
