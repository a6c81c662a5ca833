//! OFF meshes of Q, of `∂Q`, and sampled triangulations of `∂P`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use crate::ball::{BallPolyhedron, CenterSet};
use crate::error::Result;
use crate::geom::{Point3, Vec3};
use crate::polyhedron::order_polygon;
use crate::truncated::PolyhedronQ;
use crate::voronoi::DelaunayCell;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Point3>,
    pub triangles: Vec<[usize; 3]>,
    pub comment: Option<String>,
}

impl Mesh {
    pub fn to_off(&self) -> String {
        let mut edges = BTreeSet::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                edges.insert((a.min(b), a.max(b)));
            }
        }
        let mut s = String::from("OFF\n");
        if let Some(c) = &self.comment {
            let _ = writeln!(s, "# {c}");
        }
        let _ = writeln!(s, "{} {} {}", self.vertices.len(), self.triangles.len(), edges.len());
        for v in &self.vertices {
            let _ = writeln!(s, "{} {} {}", v.x, v.y, v.z);
        }
        for t in &self.triangles {
            let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
        }
        s
    }

    pub fn write_off(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_off())?;
        Ok(())
    }

    /// Every directed edge appears exactly once and so does its reverse.
    pub fn is_watertight(&self) -> bool {
        let mut directed: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                *directed.entry((t[k], t[(k + 1) % 3])).or_default() += 1;
            }
        }
        directed
            .iter()
            .all(|(&(a, b), &n)| n == 1 && directed.get(&(b, a)) == Some(&1))
    }

    /// Signed enclosed volume; positive for outward orientation.
    pub fn signed_volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.map(|k| self.vertices[k]);
                a.dot(&b.cross(&c)) / 6.0
            })
            .sum()
    }
}

/// Fan triangles of a Q 2-face, oriented away from `inside`.
fn face_triangles(cell: &DelaunayCell, pts: &[Point3], inside: &Point3) -> Vec<[usize; 3]> {
    let local: Vec<Point3> = cell.indices.iter().map(|&i| pts[i]).collect();
    let (a, b, c) = (local[0], local[1], local[2]);
    let mut normal = (b - a).cross(&(c - a));
    let centroid = local.iter().sum::<Point3>() / local.len() as f64;
    if normal.dot(&(centroid - inside)) < 0.0 {
        normal = -normal;
    }
    let all: Vec<usize> = (0..local.len()).collect();
    let ring: Vec<usize> = order_polygon(&local, &all, &normal).iter().map(|&k| cell.indices[k]).collect();
    (1..ring.len() - 1).map(|k| [ring[0], ring[k], ring[k + 1]]).collect()
}

fn q_mesh(q: &PolyhedronQ, centers: &CenterSet, faces: &[&DelaunayCell]) -> Mesh {
    let pts = centers.centers();
    let verts: Vec<usize> = q.vertex_set.clone();
    let local: BTreeMap<usize, usize> = verts.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let mut triangles = Vec::new();
    for f in faces {
        // orient against the centroid of a 3-cell containing the face
        let cell = q
            .three_cells
            .iter()
            .find(|t| f.indices.iter().all(|i| t.contains(i)))
            .expect("every face of Q lies in a 3-cell");
        let inside = cell.iter().map(|&i| pts[i]).sum::<Point3>() / cell.len() as f64;
        for t in face_triangles(f, pts, &inside) {
            triangles.push(t.map(|i| local[&i]));
        }
    }
    Mesh {
        vertices: verts.iter().map(|&i| pts[i]).collect(),
        triangles,
        comment: None,
    }
}

/// All 2-faces of Q, each once.
pub fn q_faces_mesh(q: &PolyhedronQ, centers: &CenterSet) -> Mesh {
    let faces: Vec<&DelaunayCell> = q.cells.iter().filter(|c| c.dimension == 2).collect();
    q_mesh(q, centers, &faces)
}

/// The 2-faces of `∂Q`, oriented outward.
pub fn boundary_mesh(q: &PolyhedronQ, centers: &CenterSet) -> Mesh {
    let faces: Vec<&DelaunayCell> = q.boundary_of_dim(2).collect();
    q_mesh(q, centers, &faces)
}

struct MeshBuilder {
    mesh: Mesh,
}

impl MeshBuilder {
    fn add(&mut self, p: Point3) -> usize {
        self.mesh.vertices.push(p);
        self.mesh.vertices.len() - 1
    }
}

/// Sampled triangulation of `∂P`. Each edge is split into `2^depth` arcs and
/// each face is filled by `2^depth` rings around its center. Faces without
/// boundary (a single ball) become an icosphere subdivided `depth` times.
pub fn p_mesh(p: &BallPolyhedron, depth: u32) -> Mesh {
    let segments = 1usize << depth;
    let mut mb = MeshBuilder { mesh: Mesh::default() };
    let vertex_ids: Vec<usize> = p.vertices().iter().map(|v| mb.add(v.position)).collect();
    // ids of the sample points of each edge, start to end
    let edge_ids: Vec<Vec<usize>> = p
        .edges()
        .iter()
        .map(|e| {
            // a closed circle needs at least three samples to bound a face
            let pieces = if e.is_full_circle() { segments.max(3) } else { segments };
            let samples = e.arc.sample(pieces);
            let mut ids = Vec::with_capacity(pieces + 1);
            for (k, s) in samples.iter().enumerate() {
                let id = match (k, e.start, e.end) {
                    (0, Some(v), _) => vertex_ids[v],
                    (k, _, Some(v)) if k == pieces => vertex_ids[v],
                    (k, None, None) if k == pieces => ids[0],
                    _ => mb.add(*s),
                };
                ids.push(id);
            }
            ids
        })
        .collect();

    for f in p.faces() {
        let c = p.centers().center(f.ball);
        if f.cycles.is_empty() {
            icosphere(&mut mb, c, depth);
            continue;
        }
        for cycle in &f.cycles {
            let mut ring: Vec<usize> = Vec::new();
            for oe in cycle {
                let ids = &edge_ids[oe.edge];
                let walk: Vec<usize> = if oe.forward {
                    ids.clone()
                } else {
                    ids.iter().rev().copied().collect()
                };
                ring.extend_from_slice(&walk[..walk.len() - 1]);
            }
            let dirs: Vec<Vec3> = ring.iter().map(|&id| (mb.mesh.vertices[id] - c).normalize()).collect();
            let mean = dirs.iter().sum::<Vec3>().normalize();
            let hub = mb.add(c + mean);
            let m = ring.len();
            // levels[l][k]: point on spoke k at fraction (l+1)/segments
            let mut levels: Vec<Vec<usize>> = Vec::new();
            for l in 1..segments {
                let t = l as f64 / segments as f64;
                levels.push(
                    dirs.iter()
                        .map(|d| mb.add(c + (mean * (1.0 - t) + d * t).normalize()))
                        .collect(),
                );
            }
            levels.push(ring.clone());
            for k in 0..m {
                let k1 = (k + 1) % m;
                mb.mesh.triangles.push([hub, levels[0][k], levels[0][k1]]);
                for l in 0..segments - 1 {
                    let (a, b) = (&levels[l], &levels[l + 1]);
                    mb.mesh.triangles.push([a[k], b[k], b[k1]]);
                    mb.mesh.triangles.push([a[k], b[k1], a[k1]]);
                }
            }
        }
    }
    let mut mesh = mb.mesh;
    mesh.comment = Some(format!(
        "approximate: sampled boundary of a ball-polyhedron, subdivision depth {depth}"
    ));
    mesh
}

fn icosphere(mb: &mut MeshBuilder, c: &Point3, depth: u32) {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<Vec3> = [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vec3::new(x, y, z).normalize())
    .collect();
    let mut tris: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..depth {
        let mut mid: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut split = |a: usize, b: usize, verts: &mut Vec<Vec3>| {
            *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
                verts.push((verts[a] + verts[b]).normalize());
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(tris.len() * 4);
        for [a, b, c] in tris {
            let ab = split(a, b, &mut verts);
            let bc = split(b, c, &mut verts);
            let ca = split(c, a, &mut verts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        tris = next;
    }
    let base = mb.mesh.vertices.len();
    mb.mesh.vertices.extend(verts.iter().map(|v| c + v));
    mb.mesh.triangles.extend(tris.iter().map(|t| t.map(|k| base + k)));
}
