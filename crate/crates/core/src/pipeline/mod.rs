//! End-to-end certification, congruence comparison, the perturbation probe,
//! mesh export and file formats.

mod certify;
mod compare;
mod export;
mod io;
mod probe;

pub use certify::{
    certify, certify_many, certify_with, Certification, DihedralEntry, Flags, HypothesisChecks, QStats,
    RigidityCertificate, RigidityVerdict, Status, CERTIFIED,
};
pub use compare::{best_isometry, compare, CongruenceReport, Isometry};
pub use export::{boundary_mesh, p_mesh, q_faces_mesh, Mesh};
pub use io::{centers_to_json, input_hash, parse_centers, read_centers, round_sig15, write_centers, CenterFile};
pub use probe::{perturbation_probe, ProbeOptions, ProbeReport, ProbeTrial, CONGRUENT_RMS};
