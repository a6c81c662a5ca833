//! Finite abstract simplicial complexes and combinatorial 2-sphere checks.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

/// A set of sorted simplices closed under taking non-empty faces.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SimplicialComplex {
    simplices: BTreeSet<Vec<usize>>,
}

impl SimplicialComplex {
    /// The complex generated by `simplices` and all their faces.
    pub fn generated_by<I, S>(simplices: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[usize]>,
    {
        let mut out = SimplicialComplex::default();
        for s in simplices {
            out.insert_closed(s.as_ref());
        }
        out
    }

    pub fn insert_closed(&mut self, simplex: &[usize]) {
        let mut s = simplex.to_vec();
        s.sort_unstable();
        s.dedup();
        if s.is_empty() || self.simplices.contains(&s) {
            return;
        }
        for k in 0..s.len() {
            let mut face = s.clone();
            face.remove(k);
            self.insert_closed(&face);
        }
        self.simplices.insert(s);
    }

    pub fn contains(&self, simplex: &[usize]) -> bool {
        let mut s = simplex.to_vec();
        s.sort_unstable();
        self.simplices.contains(&s)
    }

    pub fn simplices(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.simplices.iter()
    }

    pub fn of_dim(&self, d: usize) -> impl Iterator<Item = &Vec<usize>> {
        self.simplices.iter().filter(move |s| s.len() == d + 1)
    }

    pub fn dimension(&self) -> Option<usize> {
        self.simplices.iter().map(|s| s.len() - 1).max()
    }

    /// Number of simplices of each dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut f = vec![0; self.dimension().map_or(0, |d| d + 1)];
        for s in &self.simplices {
            f[s.len() - 1] += 1;
        }
        f
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector()
            .iter()
            .enumerate()
            .map(|(d, &n)| if d % 2 == 0 { n as i64 } else { -(n as i64) })
            .sum()
    }

    pub fn vertices(&self) -> Vec<usize> {
        self.of_dim(0).map(|s| s[0]).collect()
    }

    pub fn link(&self, v: usize) -> SimplicialComplex {
        let simplices = self
            .simplices
            .iter()
            .filter(|s| s.contains(&v) && s.len() > 1)
            .map(|s| s.iter().copied().filter(|&x| x != v).collect::<Vec<_>>());
        SimplicialComplex::generated_by(simplices)
    }

    /// Image under a vertex relabeling.
    pub fn relabel(&self, map: impl Fn(usize) -> usize) -> SimplicialComplex {
        SimplicialComplex::generated_by(self.simplices.iter().map(|s| s.iter().map(|&x| map(x)).collect::<Vec<_>>()))
    }

    pub fn is_connected(&self) -> bool {
        let verts = self.vertices();
        let Some(&start) = verts.first() else {
            return true;
        };
        let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for e in self.of_dim(1) {
            adj.entry(e[0]).or_default().push(e[1]);
            adj.entry(e[1]).or_default().push(e[0]);
        }
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in adj.get(&v).into_iter().flatten() {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen.len() == verts.len()
    }

    /// Whether the complex is a single cycle graph (1-dimensional, connected,
    /// every vertex of degree two, at least three vertices).
    pub fn is_cycle(&self) -> bool {
        if self.dimension() != Some(1) || self.vertices().len() < 3 {
            return false;
        }
        let mut degree: BTreeMap<usize, usize> = BTreeMap::new();
        for e in self.of_dim(1) {
            *degree.entry(e[0]).or_default() += 1;
            *degree.entry(e[1]).or_default() += 1;
        }
        degree.values().all(|&d| d == 2) && degree.len() == self.vertices().len() && self.is_connected()
    }

    /// Whether the triangles of a closed pure 2-complex can be oriented
    /// coherently.
    pub fn is_orientable(&self) -> bool {
        let tris: Vec<&Vec<usize>> = self.of_dim(2).collect();
        let mut by_edge: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (t, tri) in tris.iter().enumerate() {
            for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[0], tri[2])] {
                by_edge.entry((a, b)).or_default().push(t);
            }
        }
        // sign +1 keeps the sorted order (a, b, c), −1 reverses it
        let directed = |tri: &[usize], sign: i8, a: usize, b: usize| -> bool {
            let cyc = if sign > 0 { [tri[0], tri[1], tri[2]] } else { [tri[0], tri[2], tri[1]] };
            (0..3).any(|k| cyc[k] == a && cyc[(k + 1) % 3] == b)
        };
        let mut sign: Vec<i8> = vec![0; tris.len()];
        for seed in 0..tris.len() {
            if sign[seed] != 0 {
                continue;
            }
            sign[seed] = 1;
            let mut queue = VecDeque::from([seed]);
            while let Some(t) = queue.pop_front() {
                let tri = tris[t];
                for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[0], tri[2])] {
                    for &u in &by_edge[&(a, b)] {
                        if u == t {
                            continue;
                        }
                        // neighbours must traverse the shared edge in opposite directions
                        let t_ab = directed(tri, sign[t], a, b);
                        let want = if directed(tris[u], 1, a, b) == t_ab { -1 } else { 1 };
                        if sign[u] == 0 {
                            sign[u] = want;
                            queue.push_back(u);
                        } else if sign[u] != want {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Reasons the complex fails to be a combinatorial 2-sphere; empty when
    /// it is one.
    pub fn sphere_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.dimension() != Some(2) {
            out.push(format!("dimension is {:?}, not 2", self.dimension()));
            return out;
        }
        for e in self.of_dim(1) {
            let count = self.of_dim(2).filter(|t| t.contains(&e[0]) && t.contains(&e[1])).count();
            if count != 2 {
                out.push(format!("edge {e:?} lies in {count} triangles"));
            }
        }
        for v in self.vertices() {
            if !self.link(v).is_cycle() {
                out.push(format!("link of vertex {v} is not a cycle"));
            }
        }
        let chi = self.euler_characteristic();
        if chi != 2 {
            out.push(format!("Euler characteristic {chi}"));
        }
        if !self.is_connected() {
            out.push("not connected".into());
        }
        if out.is_empty() && !self.is_orientable() {
            out.push("not orientable".into());
        }
        out
    }

    pub fn is_2_sphere(&self) -> bool {
        self.sphere_violations().is_empty()
    }
}
