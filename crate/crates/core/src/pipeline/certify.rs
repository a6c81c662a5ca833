use serde::Serialize;

use super::io::{input_hash, round_sig15};
use crate::angles::all_dihedrals;
use crate::ball::{build_with, reduce_indices_with, BallPolyhedron, BuildOptions, CenterSet};
use crate::error::Error;
use crate::exec::Execution;
use crate::rigidity::{check_codecomposable, check_weakly_convex, is_infinitesimally_rigid, Framework};
use crate::truncated::{
    build_truncated_delaunay_with, check_boundary_triangles, check_nerve_isomorphism, check_no_boundary_vertex,
    check_subcomplex, extract_q, PolyhedronQ,
};
use crate::voronoi::{build_delaunay_with, build_voronoi_with, DelaunayComplex};

pub const CERTIFIED: &str = "locally rigid certified";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Certified,
    HypothesesNotMet,
    NotABallPolyhedron,
    Degenerate,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Certified => 0,
            Status::HypothesesNotMet | Status::NotABallPolyhedron => 1,
            Status::Degenerate => 2,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Flags {
    pub has_interior: bool,
    /// The reduced family generates P with every face non-empty.
    pub reduced: bool,
    pub simple: bool,
    pub standard: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DihedralEntry {
    pub edge: usize,
    pub balls: [String; 2],
    pub radians: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QStats {
    /// Delaunay cells by dimension 0..=3.
    pub delaunay_cells: [usize; 4],
    pub truncated_cells: [usize; 4],
    pub q_three_cells: usize,
    pub boundary_f_vector: [usize; 3],
    pub vertex_set_is_c: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct HypothesisChecks {
    pub no_boundary_voronoi_vertex: bool,
    pub truncated_subcomplex: bool,
    pub boundary_triangle_bijection: bool,
    pub f_vector_bijection: bool,
    pub nerve_isomorphism: bool,
    pub two_sphere: bool,
    pub weakly_convex: bool,
    pub co_decomposable: bool,
}

impl HypothesisChecks {
    fn all(&self) -> bool {
        self.no_boundary_voronoi_vertex
            && self.truncated_subcomplex
            && self.boundary_triangle_bijection
            && self.f_vector_bijection
            && self.nerve_isomorphism
            && self.two_sphere
            && self.weakly_convex
            && self.co_decomposable
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RigidityVerdict {
    pub vertices: usize,
    pub edges: usize,
    pub rank: usize,
    pub nullity: usize,
    pub rigid: bool,
    pub ill_conditioned: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RigidityCertificate {
    pub input_hash: String,
    pub input_count: usize,
    pub reduced_count: usize,
    pub reduced_labels: Vec<String>,
    pub flags: Flags,
    pub f_vector: Option<[usize; 3]>,
    pub dihedral_angles: Vec<DihedralEntry>,
    pub q: Option<QStats>,
    pub checks: Option<HypothesisChecks>,
    pub rigidity: Option<RigidityVerdict>,
    pub failures: Vec<String>,
    pub status: Status,
    pub verdict: String,
}

impl RigidityCertificate {
    pub fn is_certified(&self) -> bool {
        self.status == Status::Certified
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }
}

/// Everything `certify` builds on the way, for callers that need more than
/// the certificate.
#[derive(Debug, Clone)]
pub struct Certification {
    pub certificate: RigidityCertificate,
    pub reduced: Option<CenterSet>,
    pub polyhedron: Option<BallPolyhedron>,
    pub delaunay: Option<DelaunayComplex>,
    pub q: Option<PolyhedronQ>,
}

pub fn certify(c: &CenterSet) -> RigidityCertificate {
    certify_with(c, Execution::default()).certificate
}

/// Certify many center sets, distributing them over threads in parallel mode.
pub fn certify_many(sets: &[CenterSet], exec: Execution) -> Vec<RigidityCertificate> {
    exec.map(sets, |c| certify_with(c, Execution::Sequential).certificate)
}

pub fn certify_with(c: &CenterSet, exec: Execution) -> Certification {
    let mut out = Certification {
        certificate: RigidityCertificate {
            input_hash: input_hash(c),
            input_count: c.len(),
            reduced_count: 0,
            reduced_labels: Vec::new(),
            flags: Flags::default(),
            f_vector: None,
            dihedral_angles: Vec::new(),
            q: None,
            checks: None,
            rigidity: None,
            failures: Vec::new(),
            status: Status::Degenerate,
            verdict: String::new(),
        },
        reduced: None,
        polyhedron: None,
        delaunay: None,
        q: None,
    };
    run(c, exec, &mut out);
    out
}

fn finish(out: &mut Certification, status: Status, verdict: String) {
    out.certificate.status = status;
    out.certificate.verdict = verdict;
}

fn degenerate(out: &mut Certification, reason: String) {
    out.certificate.failures.push(reason.clone());
    finish(out, Status::Degenerate, format!("degenerate: {reason}"));
}

fn run(c: &CenterSet, exec: Execution, out: &mut Certification) {
    let cert = &mut out.certificate;
    cert.flags.has_interior = c.has_interior();
    if !cert.flags.has_interior {
        finish(out, Status::NotABallPolyhedron, Error::NotABallPolyhedron.to_string());
        return;
    }
    let keep = match reduce_indices_with(c, exec) {
        Ok(k) => k,
        Err(e) => return degenerate(out, format!("reduce: {e}")),
    };
    let reduced = c.subset(&keep);
    cert.reduced_count = reduced.len();
    cert.reduced_labels = reduced.labels().to_vec();
    let p = match build_with(&reduced, BuildOptions { strict: false, exec: Some(exec) }) {
        Ok(p) => p,
        Err(e) => return degenerate(out, format!("build: {e}")),
    };
    let cert = &mut out.certificate;
    cert.flags.reduced = true;
    cert.flags.simple = p.is_simple();
    cert.flags.standard = p.is_standard();
    cert.f_vector = Some(p.f_vector());
    let labels = reduced.labels();
    match all_dihedrals(&p) {
        Ok(angles) => {
            cert.dihedral_angles = angles
                .iter()
                .map(|a| DihedralEntry {
                    edge: a.edge,
                    balls: [labels[a.balls.0].clone(), labels[a.balls.1].clone()],
                    radians: round_sig15(a.angle),
                })
                .collect()
        }
        Err(e) => cert.failures.push(format!("dihedral angles: {e}")),
    }
    let mut unmet = Vec::new();
    if !cert.flags.simple {
        unmet.push("simple=false".to_string());
    }
    if !cert.flags.standard {
        unmet.push("standard=false".to_string());
    } else if reduced.len() < 4 {
        unmet.push(format!("standard requires at least 4 balls, found {}", reduced.len()));
    }
    out.reduced = Some(reduced.clone());
    out.polyhedron = Some(p.clone());
    if !unmet.is_empty() {
        finish(out, Status::HypothesesNotMet, format!("hypotheses not met: {}", unmet.join(", ")));
        return;
    }
    if !out.certificate.failures.is_empty() {
        let reason = out.certificate.failures.remove(0);
        return degenerate(out, reason);
    }

    let v = build_voronoi_with(&reduced, exec);
    let d = build_delaunay_with(&reduced, exec);
    let dt = build_truncated_delaunay_with(&reduced, &v, &d, exec);
    let count = |it: &mut dyn Iterator<Item = usize>| {
        let mut c = [0usize; 4];
        for dim in it {
            c[dim] += 1;
        }
        c
    };
    let delaunay_cells = count(&mut d.cells.iter().map(|c| c.dimension));
    let truncated_cells = count(&mut dt.members.iter().map(|m| m.cell.dimension));
    out.delaunay = Some(d.clone());
    if !dt.degenerate.is_empty() {
        let sets: Vec<_> = dt.degenerate.iter().map(|m| m.cell.indices.clone()).collect();
        return degenerate(out, format!("truncation undecided for cells {sets:?}"));
    }
    let q = match extract_q(&dt) {
        Ok(q) => q,
        Err(e) => return degenerate(out, format!("Q: {e}")),
    };
    let [fv, fe, ff] = p.f_vector();
    let boundary_f_vector = q.boundary_f_vector();
    let all: Vec<usize> = (0..reduced.len()).collect();
    out.certificate.q = Some(QStats {
        delaunay_cells,
        truncated_cells,
        q_three_cells: q.three_cells.len(),
        boundary_f_vector,
        vertex_set_is_c: q.vertex_set == all,
    });

    let mut failures = Vec::new();
    let mut record = |name: &str, report: crate::truncated::CheckReport| {
        let ok = report.passed();
        if let Some(s) = report.skipped {
            failures.push(format!("{name}: {s}"));
        }
        failures.extend(report.violations.into_iter().map(|m| format!("{name}: {m}")));
        ok
    };
    let sphere = q.boundary_complex().sphere_violations();
    let mut checks = HypothesisChecks {
        no_boundary_voronoi_vertex: record("no boundary Voronoi vertex", check_no_boundary_vertex(&v, &p)),
        truncated_subcomplex: record("truncated subcomplex", check_subcomplex(&dt, &d)),
        boundary_triangle_bijection: record("boundary triangles", check_boundary_triangles(&q, &p)),
        nerve_isomorphism: record("nerve", check_nerve_isomorphism(&q, &p)),
        f_vector_bijection: boundary_f_vector == [ff, fe, fv],
        two_sphere: sphere.is_empty(),
        weakly_convex: false,
        co_decomposable: false,
    };
    failures.extend(sphere.into_iter().map(|m| format!("2-sphere: {m}")));
    if !checks.f_vector_bijection {
        failures.push(format!(
            "boundary f-vector {boundary_f_vector:?} is not the reverse of {:?}",
            p.f_vector()
        ));
    }
    let wc = check_weakly_convex(&q, &reduced);
    checks.weakly_convex = wc.convex;
    if !wc.convex {
        failures.push(format!("weakly convex: centers {:?} are not extreme", wc.non_extreme));
    }
    match check_codecomposable(&q, &d, &reduced) {
        Ok(_) => checks.co_decomposable = true,
        Err(e) => failures.push(format!("co-decomposable: {e}")),
    }
    let all_checks = checks.all();
    out.certificate.checks = Some(checks);
    out.certificate.failures.extend(failures);

    let tol = *reduced.tolerance();
    let rigidity = Framework::of_boundary(&q, &reduced).and_then(|(f, _)| {
        let r = is_infinitesimally_rigid(&f, &tol)?;
        Ok(RigidityVerdict {
            vertices: f.vertex_count(),
            edges: f.edges().len(),
            rank: r.rank,
            nullity: r.nullity,
            rigid: r.rigid,
            ill_conditioned: r.ill_conditioned,
        })
    });
    out.q = Some(q);
    let rigidity = match rigidity {
        Ok(r) => r,
        Err(e) => return degenerate(out, format!("rigidity: {e}")),
    };
    out.certificate.rigidity = Some(rigidity.clone());
    if rigidity.ill_conditioned {
        return degenerate(out, "ill-conditioned rigidity matrix".into());
    }
    if !all_checks {
        let first = out.certificate.failures.first().cloned().unwrap_or_default();
        finish(out, Status::Degenerate, format!("degenerate: {first}"));
        return;
    }
    if !rigidity.rigid {
        let n = rigidity.nullity;
        return degenerate(out, format!("rigidity matrix has nullity {n}"));
    }
    finish(out, Status::Certified, CERTIFIED.into());
}
