//! Command-line front end: certificates, comparisons, angles, duals, meshes
//! and the perturbation probe.
//!
//! Exit codes: 0 success or certified, 1 hypotheses not met, 2 degenerate or
//! ill-conditioned, 3 I/O or format error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ballpoly::angles::{all_dihedrals, all_face_angles};
use ballpoly::ball::{build, dual, reduce};
use ballpoly::pipeline::{
    boundary_mesh, certify_with, compare, p_mesh, perturbation_probe, q_faces_mesh, read_centers, round_sig15,
    write_centers, Mesh, ProbeOptions, Status,
};
use ballpoly::{CenterSet, Error, Execution};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(name = "ballpoly", version, about = "Local rigidity certificates for ball-polyhedra")]
struct Cli {
    /// Run everything on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and print a rigidity certificate.
    Certify {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Test two center sets for congruence of their ball-polyhedra.
    Compare { a: PathBuf, b: PathBuf },
    /// Print inner dihedral angles and face angles.
    Angles { input: PathBuf },
    /// Write the dual center set (the vertices of P).
    Dual {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write an OFF mesh.
    Export {
        input: PathBuf,
        #[arg(long, value_enum)]
        what: What,
        /// Subdivision depth of the sampled P boundary.
        #[arg(long, default_value_t = 3)]
        depth: u32,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Perturb the centers and re-solve for the original dihedral angles.
    Probe {
        input: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1e-3)]
        magnitude: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum What {
    Q,
    Boundary,
    PMesh,
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Format(_) | Error::Json(_) => 3,
        Error::NotABallPolyhedron
        | Error::NotCertified(_)
        | Error::Precondition(_)
        | Error::NoLatticeIsomorphism
        | Error::NotReduced(_) => 1,
        _ => 2,
    }
}

/// Print to `output` if given, else stdout.
fn emit(text: &str, output: Option<&Path>) -> Result<(), Error> {
    match output {
        Some(path) => std::fs::write(path, format!("{text}\n"))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}

fn angles(c: &CenterSet) -> Result<String, Error> {
    let reduced = reduce(c)?;
    let p = build(&reduced)?;
    let labels = reduced.labels();
    let dihedrals: Vec<_> = all_dihedrals(&p)?
        .iter()
        .map(|a| json!({"edge": a.edge, "balls": [labels[a.balls.0], labels[a.balls.1]], "radians": round_sig15(a.angle)}))
        .collect();
    let faces: Vec<_> = all_face_angles(&p)?
        .iter()
        .map(|a| json!({"vertex": a.vertex, "face": labels[a.face], "radians": round_sig15(a.angle)}))
        .collect();
    Ok(pretty(&json!({"dihedral_angles": dihedrals, "face_angles": faces})))
}

fn export(c: &CenterSet, what: What, depth: u32, exec: Execution) -> Result<Result<Mesh, (Status, String)>, Error> {
    if let What::PMesh = what {
        return Ok(Ok(p_mesh(&build(&reduce(c)?)?, depth)));
    }
    let cert = certify_with(c, exec);
    let (Some(q), Some(reduced)) = (cert.q, cert.reduced) else {
        let status = cert.certificate.status;
        return Ok(Err((status, cert.certificate.verdict)));
    };
    Ok(Ok(match what {
        What::Q => q_faces_mesh(&q, &reduced),
        _ => boundary_mesh(&q, &reduced),
    }))
}

fn run(cli: Cli) -> Result<u8, Error> {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::default() };
    match cli.command {
        Command::Certify { input, output } => {
            let c = read_centers(&input)?;
            let cert = certify_with(&c, exec).certificate;
            emit(&cert.to_json(), output.as_deref())?;
            eprintln!("{}", cert.verdict);
            Ok(cert.status.exit_code() as u8)
        }
        Command::Compare { a, b } => {
            let (ca, cb) = (read_centers(&a)?, read_centers(&b)?);
            let report = compare(&ca, &cb)?;
            println!("{}", pretty(&report));
            Ok(if report.congruent { 0 } else { 1 })
        }
        Command::Angles { input } => {
            println!("{}", angles(&read_centers(&input)?)?);
            Ok(0)
        }
        Command::Dual { input, output } => {
            let c = read_centers(&input)?;
            let d = dual(&build(&reduce(&c)?)?)?;
            match output {
                Some(path) => write_centers(d.polyhedron.centers(), path)?,
                None => println!("{}", ballpoly::pipeline::centers_to_json(d.polyhedron.centers())),
            }
            Ok(0)
        }
        Command::Export { input, what, depth, output } => {
            let c = read_centers(&input)?;
            match export(&c, what, depth, exec)? {
                Ok(mesh) => {
                    mesh.write_off(&output)?;
                    Ok(0)
                }
                Err((status, verdict)) => {
                    eprintln!("{verdict}");
                    Ok(status.exit_code() as u8)
                }
            }
        }
        Command::Probe { input, trials, magnitude, seed } => {
            let c = read_centers(&input)?;
            let opts = ProbeOptions { trials, magnitude, seed, exec, ..ProbeOptions::default() };
            let report = perturbation_probe(&c, opts)?;
            println!("{}", pretty(&report));
            Ok(if report.all_congruent { 0 } else { 2 })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}
