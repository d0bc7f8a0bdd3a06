use std::fs::File;
use std::io::{BufReader, Write};

use serde_json::json;

use winkler::deflect::{
    apply_operator, residual_ode, solve_infinite, solve_nonlinear_traced, write_deflection_csv,
    DeflectionProfile, FoundationLaw, LoadProfile, SolveMeta, SolverKind, UniformGrid,
};
use winkler::quad::QuadratureRule;
use winkler::spectral::discretize;
use winkler::{Error, Result};

use crate::output::{format_sig15, validate_output_path, write_atomic, RunManifest};
use crate::{DeflectArgs, DeflectMode, EXIT_OK};

use super::beam_config;

pub fn run(args: &DeflectArgs) -> Result<u8> {
    let config = beam_config(&args.config)?;
    let rule: QuadratureRule = args.rule.parse()?;
    let meta_path = args
        .meta
        .clone()
        .unwrap_or_else(|| args.out.with_extension("json"));
    validate_output_path(&args.out)?;
    validate_output_path(&meta_path)?;
    let load = LoadProfile::<f64>::from_csv(BufReader::new(File::open(&args.load)?))?;

    let mut residual = None;
    let profile = match args.mode {
        DeflectMode::Infinite => {
            let margin = match args.margin {
                Some(m) if m > 0.0 => m,
                Some(m) => {
                    return Err(Error::Domain(format!("margin must be > 0 (got {m})")));
                }
                None => 10.0 / config.alpha,
            };
            let (lo, hi) = load.support();
            let grid = UniformGrid::covering(lo - margin, hi + margin, args.dx)?;
            let profile = solve_infinite(&load, &config, &grid)?;
            if profile.meta.boundary_warning {
                eprintln!("warning: deflection still carries >1% of its peak at the grid edge; widen --margin");
            }
            let r = residual_ode(&profile, &load, |u, _| config.k * u, &config)?;
            println!("residual={}", format_sig15(r));
            residual = Some(r);
            profile
        }
        DeflectMode::Operator => {
            let matrix = discretize(&config, args.n, rule)?;
            let samples: Vec<f64> = matrix.nodes.iter().map(|&x| load.value_at(x)).collect();
            let values = apply_operator(&samples, &matrix)?;
            DeflectionProfile {
                xs: matrix.nodes,
                values,
                meta: SolveMeta {
                    solver: SolverKind::OperatorApply,
                    iterations: 0,
                    final_delta: 0.0,
                    observed_ratio: None,
                    predicted_rho: None,
                    boundary_warning: false,
                },
            }
        }
        DeflectMode::Nonlinear => {
            let eps = args.phi_cubic;
            let k = config.k;
            let deviation = match args.lipschitz {
                Some(lip) if lip >= 0.0 => lip,
                Some(lip) => {
                    return Err(Error::Domain(format!("lipschitz must be >= 0 (got {lip})")));
                }
                None => {
                    // operating-range estimate from the linear pre-solve
                    let linear = solve_nonlinear_traced(
                        &load,
                        &FoundationLaw::linear(k),
                        &config,
                        args.n,
                        rule,
                        args.tol.max(1e-14),
                        8,
                        |_, _, _| {},
                    )?;
                    3.0 * eps.abs() * linear.max_abs().powi(2)
                }
            };
            let law = FoundationLaw::new(move |u, _| k * u + eps * u * u * u, deviation);
            println!("iter,delta,ratio");
            solve_nonlinear_traced(
                &load,
                &law,
                &config,
                args.n,
                rule,
                args.tol,
                args.max_iter,
                |iteration, delta, ratio| {
                    let ratio = ratio.map_or("-".to_string(), |r| format!("{r:.6}"));
                    println!("{iteration},{delta:e},{ratio}");
                },
            )?
        }
    };

    let mut manifest = RunManifest::new("deflect");
    manifest.parameters = json!({
        "config": config,
        "mode": format!("{:?}", args.mode).to_lowercase(),
        "n": args.n,
        "rule": rule,
        "dx": args.dx,
        "margin": args.margin,
        "phi_cubic": args.phi_cubic,
        "lipschitz": args.lipschitz,
    });
    manifest.tolerances = json!({ "fixed_point": args.tol });
    manifest.inputs = vec![args.load.display().to_string()];
    manifest.outputs = vec![args.out.display().to_string(), meta_path.display().to_string()];
    manifest.seed = args.seed;

    let mut csv_buf = Vec::new();
    writeln!(csv_buf, "# manifest: {}", manifest.compact_json())?;
    write_deflection_csv(&profile, &mut csv_buf)?;
    write_atomic(&args.out, &csv_buf)?;

    let document = json!({
        "manifest": manifest,
        "meta": profile.meta,
        "samples": profile.xs.len(),
        "max_abs": profile.max_abs(),
        "residual": residual,
    });
    write_atomic(&meta_path, format!("{:#}\n", document).as_bytes())?;

    if let Some(ratio) = profile.meta.observed_ratio {
        println!(
            "iterations={} observed_ratio={} predicted_rho={}",
            profile.meta.iterations,
            format_sig15(ratio),
            profile.meta.predicted_rho.map_or("-".to_string(), format_sig15),
        );
    }
    Ok(EXIT_OK)
}
