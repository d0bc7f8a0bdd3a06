use serde_json::json;

use winkler::quad::QuadratureRule;
use winkler::spectral::{
    decay_fit, discretize, eigen_spectrum, summarize, verify_confinement, write_spectrum_csv,
};
use winkler::Result;

use crate::output::{format_sig15, validate_output_path, write_atomic, RunManifest};
use crate::{SpectrumArgs, EXIT_OK, EXIT_VIOLATION};

use super::beam_config;

pub fn run(args: &SpectrumArgs) -> Result<u8> {
    let config = beam_config(&args.config)?;
    let rule: QuadratureRule = args.rule.parse()?;
    validate_output_path(&args.csv)?;
    validate_output_path(&args.json)?;
    let matrix = discretize(&config, args.n, rule)?;
    let spectrum = eigen_spectrum(&matrix, args.solver_tol)?;
    let check = verify_confinement(&spectrum, &config, args.tol)?;
    let (slope, r2) = decay_fit(&spectrum, args.window_lo, args.window_hi)?;
    let summary = summarize(
        &spectrum,
        &matrix,
        &check,
        Some((args.window_lo, args.window_hi, slope, r2)),
    );

    let mut manifest = RunManifest::new("spectrum");
    manifest.parameters = json!({
        "config": config,
        "n": args.n,
        "rule": rule,
        "window": [args.window_lo, args.window_hi],
    });
    manifest.tolerances = json!({
        "confinement": args.tol,
        "eigensolver": args.solver_tol,
    });
    manifest.outputs = vec![args.csv.display().to_string(), args.json.display().to_string()];
    manifest.seed = args.seed;

    let mut csv_buf = Vec::new();
    {
        use std::io::Write;
        writeln!(csv_buf, "# manifest: {}", manifest.compact_json())?;
    }
    write_spectrum_csv(&spectrum, &mut csv_buf)?;
    write_atomic(&args.csv, &csv_buf)?;

    let document = json!({ "manifest": manifest, "summary": summary });
    write_atomic(&args.json, format!("{:#}\n", document).as_bytes())?;

    println!(
        "lambda1={} verdict={} decay_slope={} r2={}",
        format_sig15(summary.lambda1),
        summary.verdict,
        format_sig15(slope),
        format_sig15(r2),
    );
    if !check.confined {
        for (index, lambda) in &check.violations {
            eprintln!("confinement violation: eigenvalue {index} = {lambda:e}");
        }
        return Ok(EXIT_VIOLATION);
    }
    Ok(EXIT_OK)
}
