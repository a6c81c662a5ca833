mod common;

use ballpoly::pipeline::{perturbation_probe, ProbeOptions};
use ballpoly::{CenterSet, Error, Execution, Point3};

#[test]
fn zero_magnitude_is_identity() {
    let opts = ProbeOptions { trials: 3, magnitude: 0.0, ..ProbeOptions::default() };
    let r = perturbation_probe(&common::tetra(), opts).unwrap();
    for t in &r.trials {
        assert_eq!(t.initial_residual, 0.0);
        assert_eq!(t.final_residual, 0.0);
        assert_eq!(t.iterations, 0);
        assert!(t.rms_to_original < 1e-15);
    }
}

#[test]
fn octahedron_trials_return_to_congruent_copies() {
    let opts = ProbeOptions { trials: 10, magnitude: 1e-3, seed: 5, ..ProbeOptions::default() };
    let r = perturbation_probe(&common::perturbed_octahedron(), opts).unwrap();
    assert!(r.all_congruent, "max rms {}", r.max_rms);
    assert!(r.trials.iter().all(|t| t.initial_residual > 1e-6 && t.final_residual < 1e-12));
}

#[test]
fn seeded_runs_repeat_in_both_modes() {
    let base = ProbeOptions { trials: 8, seed: 99, ..ProbeOptions::default() };
    let a = perturbation_probe(&common::tetra(), ProbeOptions { exec: Execution::Sequential, ..base }).unwrap();
    let b = perturbation_probe(&common::tetra(), ProbeOptions { exec: Execution::Parallel, ..base }).unwrap();
    assert_eq!(a.trials, b.trials);
}

#[test]
fn uncertified_input_is_refused() {
    let lens = CenterSet::from_points(vec![Point3::zeros(), Point3::x() * 0.3, Point3::new(0.15, 0.25, 0.0)]).unwrap();
    assert!(matches!(perturbation_probe(&lens, ProbeOptions::default()), Err(Error::NotCertified(_))));
}
