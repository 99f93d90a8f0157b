//! Two-column, gnuplot-readable data files derived from a written report.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

use super::report::{RunReport, REPORT_FILE};
use super::CliError;

/// Writes the data files for `report_dir/report.json` plus a `plots.md`
/// index, returning the paths written.
pub fn emit_plot_data(report_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let path = report_dir.join(REPORT_FILE);
    if !path.is_file() {
        return Err(CliError::MissingReport(report_dir.to_path_buf()));
    }
    let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    let report: RunReport =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let kind = report.kind().unwrap_or("unknown").to_string();

    let mut files: Vec<(&str, &str, String)> = Vec::new();
    match kind.as_str() {
        "ergodic" => files.push(("convergence.dat", "T vs |avg(T) - torus average|", convergence(&report.data))),
        "commutator" => files.push(("order.dat", "grid spacing h vs relative residual (log-log slope = order)", order(&report.data))),
        "grid" => files.push(("spectrum.dat", "level index vs eigenvalue", spectrum(&report.data))),
        _ => {}
    }

    let mut index = format!("# Plot data for `{kind}` run\n\n");
    if files.is_empty() {
        index.push_str("This run kind has no series data.\n");
    }
    let mut written = Vec::new();
    for (name, caption, body) in &files {
        let p = report_dir.join(name);
        fs::write(&p, body).map_err(|e| CliError::io(&p, e))?;
        written.push(p);
        let _ = writeln!(index, "- `{name}`: {caption}");
        let logscale = if *name == "order.dat" || *name == "convergence.dat" { "set logscale xy; " } else { "" };
        let _ = writeln!(index, "  gnuplot: `{logscale}plot '{name}' using 1:2 with linespoints`");
    }
    let p = report_dir.join("plots.md");
    fs::write(&p, index).map_err(|e| CliError::io(&p, e))?;
    written.push(p);
    Ok(written)
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

fn convergence(data: &Value) -> String {
    let torus = f(&data["torus_average"]);
    let mut out = String::from("# T gap\n");
    for r in data["running"].as_array().into_iter().flatten() {
        let _ = writeln!(out, "{} {}", f(&r["t"]), (f(&r["avg"]) - torus).abs());
    }
    out
}

fn order(data: &Value) -> String {
    let mut out = String::from("# h residual\n");
    for l in data["levels"].as_array().into_iter().flatten() {
        let _ = writeln!(out, "{} {}", f(&l["h"]), f(&l["residual"]));
    }
    out
}

fn spectrum(data: &Value) -> String {
    let mut out = String::from("# k lambda_k\n");
    for (k, l) in data["eigenvalues"].as_array().into_iter().flatten().enumerate() {
        let _ = writeln!(out, "{k} {}", f(l));
    }
    out
}
