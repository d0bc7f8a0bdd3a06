use serde_json::json;

use winkler::scanner::{scan_with_cells, write_cells_csv, ScanRegion};
use winkler::Result;

use crate::output::{validate_output_path, write_atomic, RunManifest};
use crate::{ScanArgs, EXIT_OK, EXIT_VIOLATION};

pub fn run(args: &ScanArgs) -> Result<u8> {
    let region = ScanRegion::new(
        args.kappa_min,
        args.kappa_max,
        args.l_min,
        args.l_max,
        args.grid_kappa,
        args.grid_l,
        args.depth,
    )?;
    validate_output_path(&args.out)?;
    if let Some(cells_path) = &args.cells {
        validate_output_path(cells_path)?;
    }
    let mut cells = Vec::new();
    let report = scan_with_cells(&region, args.cells.as_ref().map(|_| &mut cells));

    let mut manifest = RunManifest::new("scan");
    manifest.parameters = json!({
        "region": region,
        "invert": args.invert,
    });
    manifest.outputs.push(args.out.display().to_string());
    if let Some(cells_path) = &args.cells {
        manifest.outputs.push(cells_path.display().to_string());
    }
    manifest.seed = args.seed;

    let document = json!({ "manifest": manifest, "report": report });
    write_atomic(&args.out, format!("{:#}\n", document).as_bytes())?;

    if let Some(cells_path) = &args.cells {
        let mut buf = Vec::new();
        use std::io::Write;
        writeln!(buf, "# manifest: {}", manifest.compact_json())?;
        write_cells_csv(&cells, &mut buf)?;
        write_atomic(cells_path, &buf)?;
    }

    // a deliberately negated predicate must fail on a correct build
    let verdict = if args.invert { report.min_margin < 0.0 } else { report.all_positive };
    println!(
        "min_margin={:e} witness=(kappa={}, L={}) cells={} all_positive={}{}",
        report.min_margin,
        report.witness.kappa,
        report.witness.l,
        report.cells_evaluated,
        report.all_positive,
        if args.invert { " (inverted hook)" } else { "" },
    );
    Ok(if verdict { EXIT_OK } else { EXIT_VIOLATION })
}
