//! Inner dihedral angles, face angles and the distance-angle law.
//!
//! The two unit spheres of an edge meet at every point of the edge at the
//! same angle, so the inner dihedral angle depends on the center distance
//! alone: `α(d) = 2·acos(d/2)`, equivalently `π − acos(1 − d²/2)`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::ball::{BallPolyhedron, OrientedEdge};
use crate::error::{Error, Result};
use crate::geom::ccw_angle;

/// Largest allowed gap between the geometric and closed-form dihedral angle.
pub const DIHEDRAL_CONSISTENCY: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DihedralAngle {
    pub edge: usize,
    pub balls: (usize, usize),
    /// Measured from the supporting half-spaces at the edge midpoint.
    pub angle: f64,
    pub closed_form: f64,
    /// Spread of the measured angle over three points of the edge.
    pub spread: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FaceAngle {
    pub vertex: usize,
    pub face: usize,
    pub angle: f64,
}

pub fn dihedral_from_distance(d: f64) -> Result<f64> {
    if !(d > 0.0 && d < 2.0) {
        return Err(Error::Domain(format!("center distance {d} outside (0, 2)")));
    }
    Ok(2.0 * (d / 2.0).acos())
}

pub fn distance_from_dihedral(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < PI) {
        return Err(Error::Domain(format!("dihedral angle {alpha} outside (0, π)")));
    }
    Ok(2.0 * (alpha / 2.0).cos())
}

/// `dα/dd`.
pub fn dihedral_derivative(d: f64) -> f64 {
    -1.0 / (1.0 - d * d / 4.0).sqrt()
}

pub fn inner_dihedral(p: &BallPolyhedron, edge: usize) -> Result<DihedralAngle> {
    let e = p
        .edges()
        .get(edge)
        .ok_or_else(|| Error::Domain(format!("no edge {edge}")))?;
    let tol = p.centers().tolerance();
    if e.arc.circle.is_degenerate(tol) {
        return Err(Error::TangentialEdge);
    }
    let (i, j) = e.balls;
    let ci = p.centers().center(i);
    let cj = p.centers().center(j);
    let wedge = |t: f64| {
        let x = e.arc.point_at(t);
        let ni = ci - x;
        let nj = cj - x;
        PI - ni.cross(&nj).norm().atan2(ni.dot(&nj))
    };
    let samples = [wedge(0.25), wedge(0.5), wedge(0.75)];
    let hi = samples.iter().copied().fold(f64::MIN, f64::max);
    let lo = samples.iter().copied().fold(f64::MAX, f64::min);
    let closed_form = dihedral_from_distance((ci - cj).norm())?;
    let angle = samples[1];
    if (angle - closed_form).abs() > DIHEDRAL_CONSISTENCY || hi - lo > DIHEDRAL_CONSISTENCY {
        return Err(Error::InconsistentDihedral {
            edge,
            geometric: angle,
            closed_form,
        });
    }
    Ok(DihedralAngle {
        edge,
        balls: (i, j),
        angle,
        closed_form,
        spread: hi - lo,
    })
}

pub fn all_dihedrals(p: &BallPolyhedron) -> Result<Vec<DihedralAngle>> {
    (0..p.edges().len()).map(|e| inner_dihedral(p, e)).collect()
}

/// Angle of the face of ball `face` at `vertex`, measured inside the face
/// from the outgoing to the incoming boundary edge.
pub fn face_angle(p: &BallPolyhedron, vertex: usize, face: usize) -> Result<FaceAngle> {
    let v = p
        .vertices()
        .get(vertex)
        .ok_or_else(|| Error::FaceAngle(format!("no vertex {vertex}")))?;
    let f = p
        .faces()
        .get(face)
        .ok_or_else(|| Error::FaceAngle(format!("no face {face}")))?;
    if !v.balls.contains(&f.ball) {
        return Err(Error::FaceAngle(format!("vertex {vertex} is not on face {face}")));
    }
    let along: Vec<OrientedEdge> = f.cycles.iter().flatten().copied().collect();
    let outgoing: Vec<&OrientedEdge> = along.iter().filter(|oe| p.oriented_start(**oe) == Some(vertex)).collect();
    let incoming: Vec<&OrientedEdge> = along.iter().filter(|oe| p.oriented_end(**oe) == Some(vertex)).collect();
    let ([out], [inc]) = (outgoing.as_slice(), incoming.as_slice()) else {
        return Err(Error::FaceAngle(format!(
            "{} edges of face {face} meet at vertex {vertex}",
            outgoing.len() + incoming.len()
        )));
    };
    if out.edge == inc.edge {
        return Err(Error::FaceAngle(format!("edge {} is a loop at vertex {vertex}", out.edge)));
    }
    let normal = v.position - p.centers().center(f.ball);
    let angle = ccw_angle(&p.outgoing_tangent(**out), &p.incoming_back_tangent(**inc), &normal);
    Ok(FaceAngle { vertex, face, angle })
}

pub fn all_face_angles(p: &BallPolyhedron) -> Result<Vec<FaceAngle>> {
    let mut out = Vec::new();
    for (v, vert) in p.vertices().iter().enumerate() {
        for &f in &vert.balls {
            out.push(face_angle(p, v, f)?);
        }
    }
    Ok(out)
}
