use std::collections::BTreeMap;

use super::{build, BallPolyhedron, CenterSet};
use crate::error::{Error, Result};
use crate::geom::Point3;

/// Incidence data of the vertex-edge-face structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceLattice {
    pub n_faces: usize,
    /// Faces containing each vertex, ascending.
    pub vertex_faces: Vec<Vec<usize>>,
    /// Endpoints of each edge, ascending (empty for a full circle).
    pub edge_vertices: Vec<Vec<usize>>,
    pub edge_faces: Vec<(usize, usize)>,
}

/// Element-wise correspondence between two face lattices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeMaps {
    pub vertex: Vec<usize>,
    pub edge: Vec<usize>,
    pub face: Vec<usize>,
}

impl FaceLattice {
    pub fn of(p: &BallPolyhedron) -> Self {
        FaceLattice {
            n_faces: p.faces().len(),
            vertex_faces: p.vertices().iter().map(|v| v.balls.clone()).collect(),
            edge_vertices: p
                .edges()
                .iter()
                .map(|e| {
                    let mut ends = e.endpoints();
                    ends.sort_unstable();
                    ends
                })
                .collect(),
            edge_faces: p.edges().iter().map(|e| e.balls).collect(),
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.vertex_faces.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edge_faces.len()
    }

    pub fn f_vector(&self) -> [usize; 3] {
        [self.n_vertices(), self.n_edges(), self.n_faces]
    }

    fn vertex_on_face(&self, v: usize, f: usize) -> bool {
        self.vertex_faces[v].contains(&f)
    }

    fn vertex_on_edge(&self, v: usize, e: usize) -> bool {
        self.edge_vertices[e].contains(&v)
    }

    fn edge_on_face(&self, e: usize, f: usize) -> bool {
        let (a, b) = self.edge_faces[e];
        a == f || b == f
    }

    /// Number of faces adjacent to each face through an edge.
    pub fn face_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n_faces];
        for &(a, b) in &self.edge_faces {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    /// Vertex and edge maps induced by a face map, if every vertex and edge
    /// has an image with the mapped face set and endpoints.
    pub fn induced_maps(&self, other: &FaceLattice, face: &[usize]) -> Option<LatticeMaps> {
        if self.f_vector() != other.f_vector() || face.len() != self.n_faces {
            return None;
        }
        let mut vertex_index: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (v, fs) in other.vertex_faces.iter().enumerate() {
            vertex_index.entry(fs.clone()).or_default().push(v);
        }
        let mut vertex = Vec::with_capacity(self.n_vertices());
        for fs in &self.vertex_faces {
            let mut key: Vec<usize> = fs.iter().map(|&f| face[f]).collect();
            key.sort_unstable();
            match vertex_index.get(&key).map(|v| v.as_slice()) {
                Some([w]) => vertex.push(*w),
                _ => return None,
            }
        }
        let mut edge_index: BTreeMap<((usize, usize), Vec<usize>), usize> = BTreeMap::new();
        for e in 0..other.n_edges() {
            edge_index.insert((other.edge_faces[e], other.edge_vertices[e].clone()), e);
        }
        let mut edge = Vec::with_capacity(self.n_edges());
        for e in 0..self.n_edges() {
            let (a, b) = self.edge_faces[e];
            let pair = (face[a].min(face[b]), face[a].max(face[b]));
            let mut ends: Vec<usize> = self.edge_vertices[e].iter().map(|&v| vertex[v]).collect();
            ends.sort_unstable();
            edge.push(*edge_index.get(&(pair, ends))?);
        }
        let maps = LatticeMaps {
            vertex,
            edge,
            face: face.to_vec(),
        };
        self.check_isomorphism(other, &maps).ok().map(|_| maps)
    }

    /// Verify that `maps` is an inclusion-preserving bijection onto `other`.
    pub fn check_isomorphism(&self, other: &FaceLattice, maps: &LatticeMaps) -> Result<()> {
        let fail = |msg: String| Err(Error::DualityCheckFailed(msg));
        if self.f_vector() != other.f_vector() {
            return fail(format!("f-vectors {:?} and {:?} differ", self.f_vector(), other.f_vector()));
        }
        check_bijection("vertex", &maps.vertex, other.n_vertices())?;
        check_bijection("edge", &maps.edge, other.n_edges())?;
        check_bijection("face", &maps.face, other.n_faces)?;
        for v in 0..self.n_vertices() {
            for e in 0..self.n_edges() {
                if self.vertex_on_edge(v, e) != other.vertex_on_edge(maps.vertex[v], maps.edge[e]) {
                    return fail(format!("vertex {v} / edge {e} incidence not preserved"));
                }
            }
            for f in 0..self.n_faces {
                if self.vertex_on_face(v, f) != other.vertex_on_face(maps.vertex[v], maps.face[f]) {
                    return fail(format!("vertex {v} / face {f} incidence not preserved"));
                }
            }
        }
        for e in 0..self.n_edges() {
            for f in 0..self.n_faces {
                if self.edge_on_face(e, f) != other.edge_on_face(maps.edge[e], maps.face[f]) {
                    return fail(format!("edge {e} / face {f} incidence not preserved"));
                }
            }
        }
        Ok(())
    }

    /// Verify that `maps` (vertices to faces, edges to edges, faces to
    /// vertices) is an inclusion-reversing bijection onto `other`.
    pub fn check_anti_isomorphism(&self, other: &FaceLattice, maps: &LatticeMaps) -> Result<()> {
        let fail = |msg: String| Err(Error::DualityCheckFailed(msg));
        let [v, e, f] = self.f_vector();
        if other.f_vector() != [f, e, v] {
            return fail(format!("f-vectors {:?} and {:?} are not reversed", self.f_vector(), other.f_vector()));
        }
        check_bijection("vertex", &maps.vertex, other.n_faces)?;
        check_bijection("edge", &maps.edge, other.n_edges())?;
        check_bijection("face", &maps.face, other.n_vertices())?;
        for v in 0..self.n_vertices() {
            for e in 0..self.n_edges() {
                if self.vertex_on_edge(v, e) != other.edge_on_face(maps.edge[e], maps.vertex[v]) {
                    return fail(format!("vertex {v} / edge {e} incidence not reversed"));
                }
            }
            for f in 0..self.n_faces {
                if self.vertex_on_face(v, f) != other.vertex_on_face(maps.face[f], maps.vertex[v]) {
                    return fail(format!("vertex {v} / face {f} incidence not reversed"));
                }
            }
        }
        for e in 0..self.n_edges() {
            for f in 0..self.n_faces {
                if self.edge_on_face(e, f) != other.vertex_on_edge(maps.face[f], maps.edge[e]) {
                    return fail(format!("edge {e} / face {f} incidence not reversed"));
                }
            }
        }
        Ok(())
    }

    /// All face maps inducing an isomorphism onto `other`, by backtracking
    /// over face assignments that respect face degrees and adjacency.
    pub fn isomorphisms(&self, other: &FaceLattice, limit: usize) -> Vec<LatticeMaps> {
        let mut found = Vec::new();
        if self.f_vector() != other.f_vector() {
            return found;
        }
        let n = self.n_faces;
        let deg_a = self.face_degrees();
        let deg_b = other.face_degrees();
        let mut sorted_a = deg_a.clone();
        let mut sorted_b = deg_b.clone();
        sorted_a.sort_unstable();
        sorted_b.sort_unstable();
        if sorted_a != sorted_b {
            return found;
        }
        let adjacency = |l: &FaceLattice| {
            let mut adj = vec![vec![0usize; l.n_faces]; l.n_faces];
            for &(a, b) in &l.edge_faces {
                adj[a][b] += 1;
                adj[b][a] += 1;
            }
            adj
        };
        let adj_a = adjacency(self);
        let adj_b = adjacency(other);
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];

        // both lattices, their face degrees and their face adjacency lists
        type Search<'a> = (
            &'a FaceLattice,
            &'a FaceLattice,
            &'a [usize],
            &'a [usize],
            &'a [Vec<usize>],
            &'a [Vec<usize>],
        );

        fn rec(
            k: usize,
            ctx: Search,
            map: &mut Vec<usize>,
            used: &mut Vec<bool>,
            found: &mut Vec<LatticeMaps>,
            limit: usize,
        ) {
            let (a, b, deg_a, deg_b, adj_a, adj_b) = ctx;
            if found.len() >= limit {
                return;
            }
            if k == map.len() {
                if let Some(m) = a.induced_maps(b, map) {
                    found.push(m);
                }
                return;
            }
            for t in 0..map.len() {
                if used[t] || deg_a[k] != deg_b[t] {
                    continue;
                }
                if (0..k).any(|j| adj_a[k][j] != adj_b[t][map[j]]) {
                    continue;
                }
                map[k] = t;
                used[t] = true;
                rec(k + 1, ctx, map, used, found, limit);
                used[t] = false;
                map[k] = usize::MAX;
            }
        }
        rec(
            0,
            (self, other, &deg_a, &deg_b, &adj_a, &adj_b),
            &mut map,
            &mut used,
            &mut found,
            limit,
        );
        found
    }
}

fn check_bijection(what: &str, map: &[usize], target: usize) -> Result<()> {
    let mut hit = vec![false; target];
    for &t in map {
        if t >= target || hit[t] {
            return Err(Error::DualityCheckFailed(format!("{what} map is not a bijection")));
        }
        hit[t] = true;
    }
    if map.len() != target {
        return Err(Error::DualityCheckFailed(format!("{what} map is not a bijection")));
    }
    Ok(())
}

/// `P* = B(vertices of P)` with the anti-isomorphism to `P`.
#[derive(Debug, Clone)]
pub struct DualPolyhedron {
    pub polyhedron: BallPolyhedron,
    /// Vertex `v` of P ↦ face of P*, face `i` of P ↦ vertex of P*, edges to edges.
    pub maps: LatticeMaps,
}

/// Index of the point of `candidates` within `radius` of `x`, if exactly one.
fn match_point(x: &Point3, candidates: impl Iterator<Item = Point3>, radius: f64) -> Option<usize> {
    let hits: Vec<usize> = candidates
        .enumerate()
        .filter(|(_, p)| (p - x).norm() <= radius)
        .map(|(k, _)| k)
        .collect();
    match hits.as_slice() {
        [k] => Some(*k),
        _ => None,
    }
}

pub fn dual(p: &BallPolyhedron) -> Result<DualPolyhedron> {
    if !p.is_standard() {
        return Err(Error::Precondition("dual requires a standard ball-polyhedron".into()));
    }
    let tol = *p.centers().tolerance();
    let points: Vec<Point3> = p.vertices().iter().map(|v| v.position).collect();
    let labels = (0..points.len()).map(|v| format!("v{v}")).collect();
    let centers = CenterSet::new(points, Some(labels), tol)?;
    let star = build(&centers).map_err(|e| Error::DualityCheckFailed(format!("building the dual: {e}")))?;
    if !star.is_standard() {
        return Err(Error::DualityCheckFailed("dual is not standard".into()));
    }
    let radius = 1e3 * tol.merge_radius();
    let face = (0..p.faces().len())
        .map(|i| {
            match_point(p.centers().center(i), star.vertices().iter().map(|v| v.position), radius).ok_or_else(|| {
                Error::DualityCheckFailed(format!("no vertex of the dual at center {i}"))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let star_edges: BTreeMap<((usize, usize), Vec<usize>), usize> = star
        .edges()
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let mut ends = e.endpoints();
            ends.sort_unstable();
            ((e.balls, ends), k)
        })
        .collect();
    let edge = p
        .edges()
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let ends = e.endpoints();
            let [a, b] = ends[..] else {
                return Err(Error::DualityCheckFailed(format!("edge {k} has {} endpoints", ends.len())));
            };
            let (fa, fb) = (face[e.balls.0], face[e.balls.1]);
            star_edges
                .get(&((a.min(b), a.max(b)), vec![fa.min(fb), fa.max(fb)]))
                .copied()
                .ok_or_else(|| Error::DualityCheckFailed(format!("edge {k} has no dual edge")))
        })
        .collect::<Result<Vec<_>>>()?;
    let maps = LatticeMaps {
        vertex: (0..p.vertices().len()).collect(),
        edge,
        face,
    };
    FaceLattice::of(p).check_anti_isomorphism(&FaceLattice::of(&star), &maps)?;
    Ok(DualPolyhedron { polyhedron: star, maps })
}

/// Isomorphism from `p` to `dual(dual(p))`, matching faces by center position.
pub fn double_dual_isomorphism(p: &BallPolyhedron) -> Result<(BallPolyhedron, LatticeMaps)> {
    let first = dual(p)?;
    let second = dual(&first.polyhedron)?;
    let pp = second.polyhedron;
    let radius = 1e3 * p.centers().tolerance().merge_radius();
    let face = (0..p.faces().len())
        .map(|i| {
            match_point(p.centers().center(i), pp.centers().centers().iter().copied(), radius)
                .ok_or_else(|| Error::DualityCheckFailed(format!("center {i} missing from the double dual")))
        })
        .collect::<Result<Vec<_>>>()?;
    let a = FaceLattice::of(p);
    let b = FaceLattice::of(&pp);
    let maps = a
        .induced_maps(&b, &face)
        .ok_or_else(|| Error::DualityCheckFailed("double dual is not isomorphic".into()))?;
    Ok((pp, maps))
}
