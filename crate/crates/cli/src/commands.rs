use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;
use tefdyn::branch::{
    continue_branch, discs_of_univalence, min_pairwise_boundary_distance, trace_asymptotic_curve,
    tract_angular_measure, ObstructionKind,
};
use tefdyn::dynamics::certify_hyperbolic;
use tefdyn::instability::{find_instability_parameter, zeros_of_f1};
use tefdyn::metrics::{eta_omega_scan, eta_scan, poly_decay_scan, spherical_expansion_scan};
use tefdyn::raster::{render, write_with_sidecar, Classifier, RasterConfig};
use tefdyn::reproduce::{run_all, summary_csv};
use tefdyn::{Disc, Error, Region, Result};

use crate::cli::*;

/// Writes `bytes` to `out` plus a `<stem>.meta.json` sidecar holding the
/// merged arguments, or prints them when no output path is given.
fn emit(command: &str, args: &impl Serialize, out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, bytes)?;
            let sidecar = serde_json::json!({ "command": command, "args": args });
            fs::write(path.with_extension("meta.json"), serde_json::to_vec_pretty(&sidecar)?)?;
        }
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn json_bytes(value: &serde_json::Value) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Runs one subcommand. `Ok(false)` means the command ran but reported failure.
pub fn run(command: &Command, threads: Option<usize>) -> Result<bool> {
    let name = command.name();
    match command {
        Command::Render(a) => {
            let mut cfg = RasterConfig::new(map_of(&a.map), a.viewport, a.size.0, a.size.1);
            cfg.budget = a.budget;
            cfg.classifier = a.classifier.unwrap_or_else(|| Classifier::default_for(&cfg.map));
            cfg.convergence = a.convergence;
            cfg.escape_re = a.escape_re;
            let image = render(&cfg, threads)?;
            write_with_sidecar(&image, &cfg, &a.out)?;
        }
        Command::EtaScan(a) => {
            let report = eta_scan(&map_of(&a.map), &a.thresholds, &a.sampler.config())?;
            emit(name, a, a.out.as_deref(), report.to_csv().as_bytes())?;
        }
        Command::SphericalScan(a) => {
            let report = spherical_expansion_scan(&map_of(&a.map), a.threshold, &a.sampler.config())?;
            emit(name, a, a.out.as_deref(), report.to_csv().as_bytes())?;
        }
        Command::PolyScan(a) => {
            let u = Disc::new(a.s, a.u_radius);
            let report = poly_decay_scan(&map_of(&a.map), a.s, u, a.tau, &a.sampler.config())?;
            emit(name, a, a.out.as_deref(), report.to_csv().as_bytes())?;
        }
        Command::EtaOmega(a) => {
            let omega = parse_region(&a.omega)?;
            let report = eta_omega_scan(&map_of(&a.map), omega, &a.thresholds, &a.sampler.config())?;
            emit(name, a, a.out.as_deref(), report.to_csv().as_bytes())?;
        }
        Command::Certify(a) => {
            let cert = certify_hyperbolic(&map_of(&a.map), &a.radii);
            emit(name, a, a.out.as_deref(), &json_bytes(&cert.to_json())?)?;
        }
        Command::TraceBranch(a) => {
            let state = continue_branch(&map_of(&a.map), a.z0, a.max_radius)?;
            let mut json = state.to_json();
            if let (Some(modulus), Some(o)) = (a.curve_modulus, state.obstruction) {
                if o.kind == ObstructionKind::Asymptotic {
                    let curve = trace_asymptotic_curve(&state, modulus)?;
                    if let Some(path) = &a.out {
                        fs::write(path.with_extension("curve.csv"), curve.to_csv())?;
                    }
                    json["curvePoints"] = curve.samples.len().into();
                }
            }
            emit(name, a, a.out.as_deref(), &json_bytes(&json)?)?;
        }
        Command::Tracts(a) => {
            let u = Disc::new(a.u_center.unwrap_or(a.s), a.u_radius);
            let tracts = discs_of_univalence(&map_of(&a.map), a.s, u, a.count)?;
            let mut csv = String::from("tract,branch,x,theta\n");
            for (k, tract) in tracts.iter().enumerate() {
                for &x in &a.x {
                    let theta = tract_angular_measure(tract, x)?;
                    let _ = writeln!(csv, "{k},{},{x:e},{theta:e}", tract.branch_index);
                }
            }
            let _ = writeln!(
                csv,
                "# min boundary distance {:e}",
                min_pairwise_boundary_distance(&tracts)
            );
            if let Some(dir) = &a.boundaries {
                fs::create_dir_all(dir)?;
                for (k, tract) in tracts.iter().enumerate() {
                    fs::write(dir.join(format!("tract-{k}.csv")), tract.boundary_csv())?;
                }
            }
            emit(name, a, a.out.as_deref(), csv.as_bytes())?;
        }
        Command::Instability(a) => {
            let result = find_instability_parameter(a.p, a.n, a.delta)?;
            emit(name, a, a.out.as_deref(), &json_bytes(&result.to_json())?)?;
        }
        Command::ZerosF1(a) => {
            let search = zeros_of_f1((a.im_min, a.im_max), a.per_strip)?;
            let mut csv = String::from("re,im\n");
            for z in &search.roots {
                let _ = writeln!(csv, "{:e},{:e}", z.re, z.im);
            }
            emit(name, a, a.out.as_deref(), csv.as_bytes())?;
        }
        Command::Report(a) => {
            let path = a.out_dir.join("summary.csv");
            // Fail on an unwritable directory before the suite runs.
            fs::write(&path, b"")?;
            let outcomes = run_all();
            fs::write(&path, summary_csv(&outcomes))?;
            for o in &outcomes {
                eprintln!("criterion {:>2} {} {}", o.id, o.status(), o.title);
            }
            return Ok(outcomes.iter().all(|o| o.passed));
        }
    }
    Ok(true)
}

fn parse_region(s: &str) -> Result<Region> {
    let bad = || Error::PreconditionViolated(format!("unknown region `{s}`"));
    if s == "unit-disc" {
        return Ok(Region::UnitDisc);
    }
    let (kind, value) = s.split_once(':').ok_or_else(bad)?;
    let value: f64 = value.parse().map_err(|_| bad())?;
    match kind {
        "right" => Ok(Region::RightHalfPlane(value)),
        "exterior" => Ok(Region::ExteriorOfRadius(value)),
        _ => Err(bad()),
    }
}
