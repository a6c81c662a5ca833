use nalgebra::{Matrix3, SVD};
use serde::Serialize;

use crate::angles::all_dihedrals;
use crate::ball::{build, reduce, BallPolyhedron, CenterSet, FaceLattice};
use crate::error::{Error, Result};
use crate::geom::Point3;

/// Upper bound on the lattice isomorphisms tried.
const MAX_ISOMORPHISMS: usize = 10_000;

/// `x ↦ rotation · x + translation`; `reflection` when the determinant is −1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Isometry {
    pub rotation: Matrix3<f64>,
    pub translation: Point3,
    pub reflection: bool,
}

impl Isometry {
    pub fn apply(&self, x: &Point3) -> Point3 {
        self.rotation * x + self.translation
    }

    pub fn apply_inverse(&self, y: &Point3) -> Point3 {
        self.rotation.transpose() * (y - self.translation)
    }
}

/// Least-squares orthogonal map sending `a[k]` to `b[k]`, reflections
/// allowed, with its RMS residual.
pub fn best_isometry(a: &[Point3], b: &[Point3]) -> (Isometry, f64) {
    let n = a.len() as f64;
    let ca = a.iter().sum::<Point3>() / n;
    let cb = b.iter().sum::<Point3>() / n;
    let mut h = Matrix3::zeros();
    for (p, q) in a.iter().zip(b) {
        h += (q - cb) * (p - ca).transpose();
    }
    let svd = SVD::new(h, true, true);
    let rotation = svd.u.expect("u requested") * svd.v_t.expect("v_t requested");
    let translation = cb - rotation * ca;
    let iso = Isometry {
        rotation,
        translation,
        reflection: rotation.determinant() < 0.0,
    };
    let rms = (a.iter().zip(b).map(|(p, q)| (iso.apply(p) - q).norm_squared()).sum::<f64>() / n).sqrt();
    (iso, rms)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CongruenceReport {
    pub lattice_isomorphic: bool,
    /// Face (center) `i` of the first polyhedron ↦ face of the second.
    pub face_map: Vec<usize>,
    pub dihedral_max_deviation: f64,
    pub face_hausdorff_max: f64,
    pub isometry: Isometry,
    pub rms: f64,
    pub congruent: bool,
}

fn prepare(c: &CenterSet) -> Result<BallPolyhedron> {
    let p = build(&reduce(c)?)?;
    if !p.is_simple() || !p.is_standard() {
        return Err(Error::NotCertified("compare needs simple standard ball-polyhedra".into()));
    }
    Ok(p)
}

/// Directed Hausdorff distance from the face `fa` of `a`, mapped by `iso`,
/// to the face `fb` of `b`, estimated from face samples.
fn directed_face_distance(a: &BallPolyhedron, fa: usize, b: &BallPolyhedron, fb: usize, map: impl Fn(&Point3) -> Point3) -> f64 {
    a.sample_face(fa, 400, 24)
        .iter()
        .map(|x| b.distance_to_face(&map(x), fb))
        .fold(0.0, f64::max)
}

pub fn compare(c1: &CenterSet, c2: &CenterSet) -> Result<CongruenceReport> {
    let a = prepare(c1)?;
    let b = prepare(c2)?;
    let la = FaceLattice::of(&a);
    let lb = FaceLattice::of(&b);
    let isos = la.isomorphisms(&lb, MAX_ISOMORPHISMS);
    let pa = a.centers().centers();
    let pb = b.centers().centers();
    let best = isos
        .into_iter()
        .map(|m| {
            let mapped: Vec<Point3> = m.face.iter().map(|&j| pb[j]).collect();
            let (iso, rms) = best_isometry(pa, &mapped);
            (m, iso, rms)
        })
        .min_by(|x, y| x.2.total_cmp(&y.2))
        .ok_or(Error::NoLatticeIsomorphism)?;
    let (maps, iso, rms) = best;

    let da = all_dihedrals(&a)?;
    let db = all_dihedrals(&b)?;
    let dihedral_max_deviation = (0..da.len())
        .map(|e| (da[e].angle - db[maps.edge[e]].angle).abs())
        .fold(0.0, f64::max);

    let mut face_hausdorff_max: f64 = 0.0;
    for i in 0..a.faces().len() {
        let j = maps.face[i];
        let forward = directed_face_distance(&a, i, &b, j, |x| iso.apply(x));
        let backward = directed_face_distance(&b, j, &a, i, |y| iso.apply_inverse(y));
        face_hausdorff_max = face_hausdorff_max.max(forward).max(backward);
    }
    let eps = c1.tolerance().eps_geom.max(c2.tolerance().eps_geom);
    Ok(CongruenceReport {
        lattice_isomorphic: true,
        face_map: maps.face,
        dihedral_max_deviation,
        face_hausdorff_max,
        isometry: iso,
        rms,
        congruent: rms <= eps,
    })
}
