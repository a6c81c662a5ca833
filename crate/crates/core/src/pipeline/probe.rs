//! Numerical illustration of local rigidity: perturb the centers, solve for
//! a configuration with the original dihedral angles and check that the
//! solution is congruent to the original.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::certify::{certify_with, Status};
use super::compare::best_isometry;
use crate::angles::{dihedral_derivative, dihedral_from_distance};
use crate::ball::{build, CenterSet, FaceLattice};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geom::Point3;
use crate::rigidity::trivial_basis;

/// Largest RMS distance to the aligned original counted as congruent.
pub const CONGRUENT_RMS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeOptions {
    pub trials: usize,
    /// RMS displacement per center.
    pub magnitude: f64,
    pub seed: u64,
    pub max_iterations: usize,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            trials: 100,
            magnitude: 1e-3,
            seed: 0,
            max_iterations: 50,
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeTrial {
    pub trial: usize,
    pub initial_residual: f64,
    pub final_residual: f64,
    pub iterations: usize,
    pub rms_to_original: f64,
    pub lattice_preserved: bool,
    pub congruent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub options: ProbeOptions,
    pub trials: Vec<ProbeTrial>,
    pub all_congruent: bool,
    pub max_rms: f64,
}

/// Dihedral residuals `α(|x_i − x_j|) − α*` over the edge pairs, or `None`
/// when some pair leaves the domain of `α`.
fn residuals(x: &[Point3], pairs: &[(usize, usize)], target: &[f64]) -> Option<DVector<f64>> {
    let mut r = DVector::zeros(pairs.len());
    for (k, &(i, j)) in pairs.iter().enumerate() {
        r[k] = dihedral_from_distance((x[i] - x[j]).norm()).ok()? - target[k];
    }
    Some(r)
}

fn jacobian(x: &[Point3], pairs: &[(usize, usize)]) -> DMatrix<f64> {
    let mut jac = DMatrix::zeros(pairs.len(), 3 * x.len());
    for (k, &(i, j)) in pairs.iter().enumerate() {
        let d = x[i] - x[j];
        let len = d.norm();
        let g = d * (dihedral_derivative(len) / len);
        for a in 0..3 {
            jac[(k, 3 * i + a)] = g[a];
            jac[(k, 3 * j + a)] = -g[a];
        }
    }
    jac
}

/// Gauss-Newton with minimum-norm steps.
fn solve(mut x: Vec<Point3>, pairs: &[(usize, usize)], target: &[f64], max_iterations: usize) -> (Vec<Point3>, f64, usize) {
    let mut iterations = 0;
    let Some(mut r) = residuals(&x, pairs, target) else {
        return (x, f64::INFINITY, 0);
    };
    while iterations < max_iterations && r.amax() > 1e-14 {
        let jac = jacobian(&x, pairs);
        let Ok(pinv) = jac.pseudo_inverse(1e-10) else {
            break;
        };
        let step = pinv * &r;
        let next: Vec<Point3> = x
            .iter()
            .enumerate()
            .map(|(i, p)| p - Point3::new(step[3 * i], step[3 * i + 1], step[3 * i + 2]))
            .collect();
        let Some(rn) = residuals(&next, pairs, target) else {
            break;
        };
        iterations += 1;
        if rn.norm() > r.norm() {
            break;
        }
        x = next;
        r = rn;
    }
    let res = r.amax();
    (x, res, iterations)
}

pub fn perturbation_probe(c: &CenterSet, opts: ProbeOptions) -> Result<ProbeReport> {
    let cert = certify_with(c, opts.exec);
    if cert.certificate.status != Status::Certified {
        return Err(Error::NotCertified(cert.certificate.verdict));
    }
    let reduced = cert.reduced.expect("certified input has a reduced family");
    let p = cert.polyhedron.expect("certified input has a polyhedron");
    let lattice = FaceLattice::of(&p);
    let original = reduced.centers().to_vec();
    let n = original.len();
    let pairs: Vec<(usize, usize)> = p.edges().iter().map(|e| e.balls).collect();
    let target: Vec<f64> = pairs
        .iter()
        .map(|&(i, j)| dihedral_from_distance((original[i] - original[j]).norm()))
        .collect::<Result<_>>()?;
    let trivial = trivial_basis(&original);

    let trials = opts.exec.map_range(opts.trials, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(t as u64));
        let mut delta = DVector::from_fn(3 * n, |_, _| StandardNormal.sample(&mut rng));
        for b in &trivial {
            let c = b.dot(&delta);
            delta -= b * c;
        }
        let rms = (delta.norm_squared() / n as f64).sqrt();
        if rms > 0.0 {
            delta *= opts.magnitude / rms;
        }
        let start: Vec<Point3> = (0..n)
            .map(|i| original[i] + Point3::new(delta[3 * i], delta[3 * i + 1], delta[3 * i + 2]))
            .collect();
        let initial_residual = residuals(&start, &pairs, &target).map_or(f64::INFINITY, |r| r.amax());
        let (solved, final_residual, iterations) = solve(start, &pairs, &target, opts.max_iterations);
        let (_, rms_to_original) = best_isometry(&solved, &original);
        let lattice_preserved = reduced
            .with_points(solved.clone())
            .and_then(|cs| build(&cs))
            .map(|q| {
                let identity: Vec<usize> = (0..n).collect();
                lattice.induced_maps(&FaceLattice::of(&q), &identity).is_some()
            })
            .unwrap_or(false);
        ProbeTrial {
            trial: t,
            initial_residual,
            final_residual,
            iterations,
            rms_to_original,
            lattice_preserved,
            congruent: rms_to_original <= CONGRUENT_RMS && lattice_preserved,
        }
    });
    let max_rms = trials.iter().map(|t| t.rms_to_original).fold(0.0, f64::max);
    Ok(ProbeReport {
        options: opts,
        all_congruent: trials.iter().all(|t| t.congruent),
        max_rms,
        trials,
    })
}
